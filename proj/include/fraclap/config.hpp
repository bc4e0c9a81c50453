#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fraclap/fields.hpp"
#include "fraclap/geometry.hpp"

namespace fraclap {

struct DataSpec {
    std::string kind = "zero";  // zero | constant | getoor | sine | exp
    double value = 1.0;
    double k = 1.0;
};

// Normalized run configuration; every field is explicit after parse() and the
// hash covers the normalized serialization.
struct RunConfig {
    std::string domain_kind = "interval";  // interval | polygon
    double a = -1.0, b = 1.0;
    std::vector<Vec2> polygon_vertices;
    double s = 0.5;
    DataSpec f;
    DataSpec big_f;

    int n = 64;
    int degree = 1;
    double grading = 1.0;
    double Y = 0.0;
    int ext_n_omega = 48;
    int ext_degree = 1;

    std::vector<double> eps_set{0.05, 0.1, 0.25};
    int p_max = 6;
    std::vector<double> r_ladder{0.4, 0.2, 0.1};

    double cover_c = 0.25;
    double cover_c_hat = 0.0;
    double xi = 0.0;  // 0 -> auto
    int mc_samples = 100000;

    unsigned long long seed = 1;
    int threads = 1;
    std::string out_dir = "out";

    std::string hash;  // of the normalized serialization

    static RunConfig parse(const std::string& json_text);
    static RunConfig from_file(const std::string& path);
    std::string serialize() const;
};

// Closed-form right-hand sides addressable from configs and presets.
std::shared_ptr<Field1D> make_data_field(const DataSpec& spec, double s);

}  // namespace fraclap
