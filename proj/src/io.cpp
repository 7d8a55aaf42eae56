#include "tbody/io.hpp"

#include <fstream>
#include <sstream>

namespace tbody::io {

json to_json(const Vec& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

json to_json(const Mat& m) {
    json j = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(to_json(Vec(m.row(r).transpose())));
    return j;
}

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw MalformedInput("expected an array of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw MalformedInput("expected a number");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw MalformedInput("expected a nonempty list of rows");
    const size_t cols = j[0].is_array() ? j[0].size() : 0;
    Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < j.size(); ++r) {
        const Vec row = vec_from_json(j[r]);
        if (static_cast<size_t>(row.size()) != cols) throw MalformedInput("ragged matrix rows");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw MalformedInput(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

}  // namespace

json body_to_json(const SymBody& b) {
    json j;
    if (b.is_polytope()) {
        j["kind"] = "vpoly";
        j["dim"] = b.dim();
        j["vertices"] = to_json(Mat(b.vertices().transpose()));
    } else {
        j["kind"] = "ellipsoid";
        j["dim"] = b.dim();
        j["shape"] = to_json(b.shape());
    }
    return j;
}

SymBody body_from_json(const json& j) {
    const json& kind = field(j, "kind");
    if (!kind.is_string()) throw MalformedInput("\"kind\" must be a string");
    const json& dj = field(j, "dim");
    if (!dj.is_number_integer() || dj.get<int>() < 1) throw MalformedInput("\"dim\" must be a positive integer");
    const int d = dj.get<int>();
    if (kind == "vpoly") {
        const Mat rows = mat_from_json(field(j, "vertices"));
        require_dim(rows.cols(), d, "vertex");
        return SymBody::polytope(rows.transpose());
    }
    if (kind == "ellipsoid") {
        const Mat m = mat_from_json(field(j, "shape"));
        require_dim(m.rows(), d, "shape matrix");
        return SymBody::ellipsoid(m);
    }
    throw MalformedInput("unknown body kind \"" + kind.get<std::string>() + "\"");
}

json element_to_json(const GlTensorElement& t) {
    json j;
    j["shape"] = t.shape().dims();
    j["sigma"] = t.sigma();
    json f = json::array();
    for (const auto& m : t.factors()) f.push_back(to_json(m));
    j["factors"] = f;
    return j;
}

GlTensorElement element_from_json(const json& j) {
    const json& sj = field(j, "shape");
    const json& pj = field(j, "sigma");
    const json& fj = field(j, "factors");
    if (!sj.is_array() || !pj.is_array() || !fj.is_array()) throw MalformedInput("element fields must be arrays");
    std::vector<int> dims, sigma;
    for (const auto& x : sj) {
        if (!x.is_number_integer()) throw MalformedInput("shape entries must be integers");
        dims.push_back(x.get<int>());
    }
    for (const auto& x : pj) {
        if (!x.is_number_integer()) throw MalformedInput("sigma entries must be integers");
        sigma.push_back(x.get<int>());
    }
    std::vector<Mat> factors;
    for (const auto& x : fj) factors.push_back(mat_from_json(x));
    return GlTensorElement::restore(TensorShape(dims), std::move(sigma), std::move(factors));
}

json certificate_to_json(const BmCertificate& c) {
    json j;
    j["lambda"] = c.lambda;
    j["element"] = element_to_json(c.element);
    j["slack"] = {c.slack_inner, c.slack_outer};
    j["budget"] = {{"restarts", c.budget.restarts}, {"steps", c.budget.steps}};
    j["seed"] = c.seed;
    return j;
}

BmCertificate certificate_from_json(const json& j) {
    const json& s = field(j, "slack");
    if (!s.is_array() || s.size() != 2) throw MalformedInput("\"slack\" must hold two numbers");
    const json& b = field(j, "budget");
    BmCertificate c{field(j, "lambda").get<double>(), element_from_json(field(j, "element")),
                    s[0].get<double>(), s[1].get<double>(),
                    {field(b, "restarts").get<int>(), field(b, "steps").get<int>()},
                    field(j, "seed").get<std::uint64_t>()};
    return c;
}

json verdict_to_json(const TensorialVerdict& v) {
    json j;
    j["verdict"] = v.tensorial ? "tensorial" : "not_tensorial";
    j["marginal"] = v.marginal;
    j["violation"] = v.violation;
    if (!v.tensorial) j["side"] = to_string(v.side);
    if (v.witness.size() > 0) j["witness"] = to_json(v.witness);
    if (!v.sections.bodies.empty()) {
        j["anchor"] = to_json(v.sections.anchor);
        json s = json::array();
        for (const auto& b : v.sections.bodies) s.push_back(body_to_json(b));
        j["sections"] = s;
        j["projective_slack"] = v.projective_slack;
        j["injective_slack"] = v.injective_slack;
    }
    return j;
}

TensorShape parse_shape(const std::string& s) {
    std::vector<int> dims;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t used = 0;
        int d = 0;
        try {
            d = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size()) throw MalformedInput("bad shape \"" + s + "\"");
        dims.push_back(d);
    }
    return TensorShape(dims);
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io_error", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedInput(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io_error", "cannot write " + path);
    out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

SymBody load_body(const std::string& path) {
    try {
        return body_from_json(read_json(path));
    } catch (const json::exception& e) {
        throw MalformedInput(path + ": " + e.what());
    }
}

void save_body(const std::string& path, const SymBody& b) { write_text(path, dump(body_to_json(b))); }

}  // namespace tbody::io
