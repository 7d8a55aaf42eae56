#include "tbody/bm.hpp"
#include "tbody/convex.hpp"
#include "tbody/invariants.hpp"
#include "tbody/io.hpp"
#include "tbody/tensor_ops.hpp"
#include "tbody/tensorial.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <iostream>

using namespace tbody;
using io::json;

namespace {

void emit(const std::string& out, const std::string& text) {
    if (out.empty())
        std::cout << text;
    else
        io::write_text(out, text);
}

void emit(const std::string& out, const json& j) { emit(out, io::dump(j)); }

int error_exit(const std::string& kind, const std::string& message, int code) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
    return code;
}

BmBudget parse_budget(const std::string& s) {
    BmBudget b;
    if (s.empty()) return b;
    const auto x = s.find('x');
    try {
        b.restarts = std::stoi(s.substr(0, x));
        if (x != std::string::npos) b.steps = std::stoi(s.substr(x + 1));
    } catch (const std::exception&) {
        throw io::MalformedInput("budget must look like RESTARTS or RESTARTSxSTEPS");
    }
    return b;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("TENSORBODY_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }

    CLI::App app{"tensorbody: tensor products and tensorial convex bodies"};
    app.require_subcommand(1);

    std::string in, out, shape_s, budget_s;
    std::string p_path, q_path, element_path, slice_path, ellipsoid_path;
    std::vector<std::string> factor_paths;
    double tol = 1e-6, t = 0.5;
    std::uint64_t seed = 1;
    int vertices = 4, extra = 8, trials = 10;
    bool pi = false, hilbert = false, eps_product = false, inverse_flag = false;

    auto add_shape = [&](CLI::App* s) { s->add_option("--shape", shape_s, "factor dimensions d1,d2[,...]")->required(); };
    auto add_out = [&](CLI::App* s) { s->add_option("--out", out, "output file (default stdout)"); };
    auto add_in = [&](CLI::App* s) { s->add_option("--in", in, "input body JSON")->required(); };

    auto* gen = app.add_subcommand("gen", "random tensorial polytope");
    add_shape(gen);
    gen->add_option("--seed", seed);
    gen->add_option("--vertices", vertices, "representatives per factor");
    gen->add_option("--extra", extra, "points between the projective and injective products");
    gen->add_option("--t", t, "interpolation cap in [0,1]; 0 gives the projective product");
    add_out(gen);

    auto* check = app.add_subcommand("check", "decide whether a body is tensorial");
    add_in(check);
    add_shape(check);
    check->add_option("--tol", tol);
    add_out(check);

    auto* product = app.add_subcommand("product", "tensor product of factor bodies");
    product->add_option("--factors", factor_paths, "factor body JSON files")->required()->expected(2, -1);
    auto* kind = product->add_option_group("kind");
    kind->add_flag("--pi", pi, "projective product (polytopes)");
    kind->add_flag("--hilbert", hilbert, "Hilbertian product (ellipsoids)");
    kind->add_flag("--eps", eps_product, "injective product");
    kind->require_option(1);
    add_out(product);

    auto* loew = app.add_subcommand("loewner", "minimum-volume centered ellipsoid");
    add_in(loew);
    add_out(loew);

    auto* convo = app.add_subcommand("conv-otimes", "projective product of the canonical sections");
    add_in(convo);
    add_shape(convo);
    add_out(convo);

    auto* lo = app.add_subcommand("l-otimes", "Kronecker product of the sections' Loewner ellipsoids");
    add_in(lo);
    add_shape(lo);
    add_out(lo);

    auto* ret = app.add_subcommand("retract", "move a tensorial body to the slice");
    add_in(ret);
    add_shape(ret);
    add_out(ret);

    auto* slice = app.add_subcommand("slice-test", "is l_(x)(Q) the Euclidean ball");
    add_in(slice);
    add_shape(slice);
    slice->add_option("--tol", tol);
    add_out(slice);

    auto* ph = app.add_subcommand("phi", "split Q into (slice body, tensorial ellipsoid), or recombine");
    ph->add_option("--in", in, "body to split");
    ph->add_flag("--inverse", inverse_flag, "recombine --slice and --ellipsoid");
    ph->add_option("--slice", slice_path);
    ph->add_option("--ellipsoid", ellipsoid_path);
    add_shape(ph);
    add_out(ph);

    auto* bmc = app.add_subcommand("bm", "upper bound on the tensorial Banach-Mazur distance");
    bmc->add_option("--p", p_path)->required();
    bmc->add_option("--q", q_path)->required();
    add_shape(bmc);
    bmc->add_option("--seed", seed);
    bmc->add_option("--budget", budget_s, "RESTARTS[xSTEPS], default 32x200");
    add_out(bmc);

    auto* hom = app.add_subcommand("homotopy", "contracting homotopy H(Q,t)");
    add_in(hom);
    add_shape(hom);
    hom->add_option("--t", t)->required();
    add_out(hom);

    auto* act = app.add_subcommand("act", "apply a GL_(x) element to a body");
    add_in(act);
    act->add_option("--element", element_path)->required();
    add_out(act);

    auto* inv = app.add_subcommand("invariants", "property suite on generated bodies, CSV report");
    add_shape(inv);
    inv->add_option("--seed", seed);
    inv->add_option("--trials", trials);
    inv->add_option("--tol", tol, "tensorial decision tolerance");
    add_out(inv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return error_exit("usage", e.what(), 2);
    }

    try {
        TensorialOptions topt;
        auto shape = [&] { return io::parse_shape(shape_s); };

        if (*gen) {
            RandomTensorialParams params{vertices, extra, t};
            emit(out, io::body_to_json(random_tensorial(seed, shape(), params)));
        } else if (*check) {
            topt.tol = tol;
            const TensorialVerdict v = is_tensorial(io::load_body(in), shape(), topt);
            emit(out, io::verdict_to_json(v));
            return v.tensorial ? 0 : 1;
        } else if (*product) {
            FactorTuple f;
            for (const auto& path : factor_paths) f.push_back(io::load_body(path));
            if (eps_product)
                throw Unsupported("the injective product has no finite vertex description here; use check/gauge oracles");
            emit(out, io::body_to_json(pi ? projective_product(f) : hilbert_product(f)));
        } else if (*loew) {
            emit(out, io::body_to_json(loewner(io::load_body(in))));
        } else if (*convo) {
            emit(out, io::body_to_json(conv_otimes(io::load_body(in), shape(), topt)));
        } else if (*lo) {
            emit(out, io::body_to_json(l_otimes(io::load_body(in), shape(), topt)));
        } else if (*ret) {
            const Retraction r = retract(io::load_body(in), shape(), topt);
            emit(out, json{{"body", io::body_to_json(r.body)}, {"xi", io::element_to_json(r.transform)}});
        } else if (*slice) {
            const SymBody e = l_otimes(io::load_body(in), shape(), topt);
            const double dist = (e.shape() - Mat::Identity(e.dim(), e.dim())).norm();
            emit(out, json{{"in_slice", dist <= tol}, {"distance", dist}, {"tolerance", tol}});
            return dist <= tol ? 0 : 1;
        } else if (*ph) {
            if (inverse_flag) {
                if (slice_path.empty() || ellipsoid_path.empty())
                    throw InvalidArgument("phi --inverse needs --slice and --ellipsoid");
                emit(out, io::body_to_json(
                              phi_inv(io::load_body(slice_path), io::load_body(ellipsoid_path), shape(), topt)));
            } else {
                if (in.empty()) throw InvalidArgument("phi needs --in");
                const PhiValue v = phi(io::load_body(in), shape(), topt);
                emit(out, json{{"slice_body", io::body_to_json(v.slice_body)},
                               {"ellipsoid", io::body_to_json(v.ellipsoid)}});
            }
        } else if (*bmc) {
            BmOptions o;
            o.seed = seed;
            o.budget = parse_budget(budget_s);
            emit(out, io::certificate_to_json(bm_upper(io::load_body(p_path), io::load_body(q_path), shape(), o)));
        } else if (*hom) {
            const HomotopyValue h = homotopy(io::load_body(in), t, shape(), topt);
            json j = io::body_to_json(h.body);
            j["ball_error"] = h.ball_error;
            j["ball_resolution"] = h.resolution;
            emit(out, j);
        } else if (*act) {
            const GlTensorElement e = io::element_from_json(io::read_json(element_path));
            emit(out, io::body_to_json(act_on_body(e, io::load_body(in))));
        } else if (*inv) {
            InvariantConfig cfg;
            cfg.shape = shape();
            cfg.seed = seed;
            cfg.trials = trials;
            cfg.tensorial.tol = tol;
            const auto rows = run_invariants(cfg);
            emit(out, invariants_csv(rows));
            for (const auto& r : rows)
                if (!r.pass) return 1;
        }
    } catch (const Error& e) {
        return error_exit(e.kind(), e.what(), 2);
    } catch (const json::exception& e) {
        return error_exit("malformed_input", e.what(), 2);
    } catch (const std::exception& e) {
        return error_exit("internal", e.what(), 3);
    }
    return 0;
}
