#include "doctest.h"
#include "oracles.hpp"

#include "tbody/bm.hpp"
#include "tbody/convex.hpp"
#include "tbody/invariants.hpp"
#include "tbody/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tbody;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("tbody_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::string& args) {
    const fs::path o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
    const std::string cmd = std::string(TENSORBODY_EXE) + " " + args + " > " + o.string() + " 2> " + e.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
}

std::string put(const std::string& name, const io::json& j) {
    const fs::path p = scratch() / name;
    io::write_text(p.string(), io::dump(j));
    return p.string();
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("body JSON round trip is bit identical") {
        std::mt19937_64 rng(1);
        for (int t = 0; t < 10; ++t) {
            const SymBody b = t % 2 ? random_tensorial(static_cast<std::uint64_t>(t), TensorShape({2, 3}))
                                    : random_tensorial_ellipsoid(TensorShape({2, 2}), rng);
            const std::string first = io::dump(io::body_to_json(b));
            const SymBody back = io::body_from_json(io::json::parse(first));
            CHECK(back.identical(b));
            CHECK(io::dump(io::body_to_json(back)) == first);
        }
    }

    TEST_CASE("element and certificate round trips") {
        std::mt19937_64 rng(2);
        for (int t = 0; t < 10; ++t) {
            const GlTensorElement g = random_element(TensorShape({2, 2, 2}), rng);
            const std::string s = io::dump(io::element_to_json(g));
            CHECK(io::element_from_json(io::json::parse(s)).identical(g));
        }
        const SymBody q = random_tensorial(4, TensorShape({2, 2}));
        BmOptions o;
        o.budget = {2, 20};
        const BmCertificate c = bm_upper(q, q, TensorShape({2, 2}), o);
        const io::json j = io::certificate_to_json(c);
        CHECK(j.contains("lambda"));
        CHECK(j.contains("element"));
        CHECK(j["slack"].size() == 2);
        const BmCertificate back = io::certificate_from_json(j);
        CHECK(back.lambda == c.lambda);
        CHECK(back.element.identical(c.element));
        CHECK(io::dump(io::certificate_to_json(back)) == io::dump(j));
    }

    TEST_CASE("malformed input") {
        CHECK_THROWS_AS(io::body_from_json(io::json::parse(R"({"kind":"blob"})")), io::MalformedInput);
        CHECK_THROWS_AS(io::body_from_json(io::json::parse(R"({"kind":"vpoly","dim":3,"vertices":[[1,0],[0,1]]})")),
                        Error);
        CHECK_THROWS_AS(io::parse_shape("2,x"), Error);
        CHECK(io::parse_shape("2,3,2") == TensorShape({2, 3, 2}));
    }
}

TEST_SUITE("cli") {
    TEST_CASE("check on the cross-polytope") {
        const std::string in = put("b1_4.json", io::body_to_json(SymBody::cross_polytope(4)));
        const Run r = run("check --in " + in + " --shape 2,2");
        REQUIRE(r.code == 0);
        const io::json j = io::json::parse(r.out);
        CHECK(j["verdict"] == "tensorial");
        CHECK(j["sections"].size() == 2);
    }

    TEST_CASE("check on a non-tensorial ellipsoid exits 1") {
        Mat m = Mat::Identity(4, 4);
        m(0, 0) = 2.0;
        const std::string in = put("diag.json", io::body_to_json(SymBody::ellipsoid(m)));
        const Run r = run("check --in " + in + " --shape 2,2");
        CHECK(r.code == 1);
        CHECK(io::json::parse(r.out)["verdict"] == "not_tensorial");
    }

    TEST_CASE("product and act") {
        const std::string f = put("b1_2.json", io::body_to_json(SymBody::cross_polytope(2)));
        const Run r = run("product --pi --factors " + f + " " + f);
        REQUIRE(r.code == 0);
        const SymBody p = io::body_from_json(io::json::parse(r.out));
        CHECK(p.vertices().cols() == 4);
        const std::string b = put("p.json", io::json::parse(r.out));
        const std::string e = put("el.json", io::element_to_json(GlTensorElement::scalar(TensorShape({2, 2}), 2.0)));
        const Run a = run("act --in " + b + " --element " + e);
        REQUIRE(a.code == 0);
        CHECK(outradius(io::body_from_json(io::json::parse(a.out))) == doctest::Approx(2.0));
    }

    TEST_CASE("bm subcommand") {
        const std::string p = put("bp.json", io::body_to_json(SymBody::cross_polytope(4)));
        const std::string q = put("bq.json", io::body_to_json(SymBody::ball(4)));
        const Run r = run("bm --p " + p + " --q " + q + " --shape 2,2 --seed 7 --budget 4x50");
        REQUIRE(r.code == 0);
        const io::json j = io::json::parse(r.out);
        CHECK(j["lambda"].get<double>() <= 2.0 + 1e-6);
        CHECK(j["seed"] == 7);
    }

    TEST_CASE("gen is deterministic and round trips through load and save") {
        const Run a = run("gen --shape 2,3 --seed 5");
        const Run b = run("gen --shape 2,3 --seed 5");
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
        const std::string path = put("g.json", io::json::parse(a.out));
        const std::string again = (scratch() / "g2.json").string();
        io::save_body(again, io::load_body(path));
        CHECK(slurp(path) == slurp(again));
    }

    TEST_CASE("invariants subcommand writes the CSV schema") {
        const std::string out = (scratch() / "inv.csv").string();
        const Run r = run("invariants --shape 2,2 --trials 2 --seed 3 --out " + out);
        CHECK(r.code == 0);
        const std::string csv = slurp(out);
        CHECK(csv.rfind("trial,seed,quantity,value,tolerance,pass\n", 0) == 0);
        const Run again = run("invariants --shape 2,2 --trials 2 --seed 3");
        CHECK(again.out == csv);
    }

    TEST_CASE("errors are reported as JSON on stderr") {
        const std::string bad = (scratch() / "bad.json").string();
        io::write_text(bad, "{ not json");
        const Run r = run("check --in " + bad + " --shape 2,2");
        CHECK(r.code == 2);
        const io::json j = io::json::parse(r.err);
        CHECK(j.contains("error"));
        CHECK(j.contains("message"));

        const Run missing = run("check --in " + (scratch() / "nope.json").string() + " --shape 2,2");
        CHECK(missing.code == 2);
        CHECK(io::json::parse(missing.err)["error"] == "io_error");

        const Run shape = run("gen --shape 2");
        CHECK(shape.code == 2);
        CHECK(io::json::parse(shape.err).contains("error"));
    }
}
