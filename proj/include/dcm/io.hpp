#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dcm/body.hpp"
#include "dcm/log_concave.hpp"
#include "dcm/measure.hpp"

namespace dcm {

// Deterministic JSON value for reports: sorted object keys, floats printed
// with %.12g, so identical inputs give byte-identical artifacts.
class JVal {
public:
    enum class Kind { Null, Bool, Num, Str, Arr, Obj };

    JVal() : kind_(Kind::Null) {}
    static JVal boolean(bool b);
    static JVal num(double v);
    static JVal str(std::string s);
    static JVal arr();
    static JVal obj();

    JVal& push(JVal v);                       // array append
    JVal& set(const std::string& k, JVal v);  // object insert
    std::string dump() const;

    Kind kind() const { return kind_; }

private:
    Kind kind_;
    bool b_ = false;
    double n_ = 0.0;
    std::string s_;
    std::vector<JVal> items_;
    std::map<std::string, JVal> fields_;
};

std::string format_double(double v);  // %.12g with inf tokens

// --- descriptors (parse via nlohmann, emit via JVal) ------------------------

ConvexBody parse_body_json(const std::string& text);
ConvexFunctionRep parse_function_json(const std::string& text);
LogConcaveFunction parse_log_concave_json(const std::string& text);
EuclideanMeasure parse_measure_json(const std::string& text);

JVal body_to_json(const ConvexBody& K);
JVal function_to_json(const ConvexFunctionRep& rep);
JVal log_concave_to_json(const LogConcaveFunction& f);
JVal measure_to_json(const EuclideanMeasure& m);
JVal spherical_to_json(const SphericalMeasure& m);

std::string measure_to_csv(const EuclideanMeasure& m);
std::string spherical_to_csv(const SphericalMeasure& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace dcm
