#pragma once

#include "tbody/bm.hpp"
#include "tbody/gl_tensor.hpp"
#include "tbody/tensorial.hpp"

#include <json.hpp>

#include <string>

namespace tbody::io {

using json = nlohmann::ordered_json;

class MalformedInput : public Error {
public:
    explicit MalformedInput(const std::string& w) : Error("malformed_input", w) {}
};

json to_json(const Vec& v);
json to_json(const Mat& m);  // list of rows
Vec vec_from_json(const json& j);
Mat mat_from_json(const json& j);

// {"kind":"vpoly","dim":d,"vertices":[[...],...]} or
// {"kind":"ellipsoid","dim":d,"shape":[[row],...]}
json body_to_json(const SymBody& b);
SymBody body_from_json(const json& j);

// {"shape":[..],"sigma":[..],"factors":[[[..]],...]}
json element_to_json(const GlTensorElement& t);
GlTensorElement element_from_json(const json& j);

// {"lambda":..,"element":..,"slack":[s1,s2],"budget":{"restarts":..,"steps":..},"seed":..}
json certificate_to_json(const BmCertificate& c);
BmCertificate certificate_from_json(const json& j);

json verdict_to_json(const TensorialVerdict& v);

TensorShape parse_shape(const std::string& s);

json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);
std::string dump(const json& j);

SymBody load_body(const std::string& path);
void save_body(const std::string& path, const SymBody& b);

}  // namespace tbody::io
