/**
 * @file verify_cli.hpp
 * @brief Config-driven scenario runner producing CSV/JSON evidence tables.
 */
#pragma once

#include "visualmetrics/boundary_cc.hpp"
#include "visualmetrics/domain_geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace visualmetrics {

// ---------------------------------------------------------------- config

/// Flat "key = value" file with [section] headers; keys are addressed as "section.key".
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    const std::string& text() const { return text_; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::string text_;
    std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------- evidence

enum class Cmp { Le, Ge, Eq };
const char* cmp_name(Cmp c);

struct EvidenceRow {
    std::string scenario;
    std::string params;  ///< "key=value;..." always including cmp=le|ge|eq
    double measured = 0.0;
    double target = 0.0;
    double tol = 0.0;
    Cmp cmp = Cmp::Eq;
    bool pass = false;
};

/// Pass flag recomputed from the row's own fields.
bool evaluate_row(double measured, double target, double tol, Cmp cmp);

/// Builds a row; `params` is extended with the comparison tag.
EvidenceRow make_row(const std::string& scenario, const std::string& params, double measured, double target, double tol,
                     Cmp cmp);

/// Parameter string helper: kv("pair", 3) + kv("h", 0.1) ...
std::string kv(const std::string& key, double value);
std::string kv(const std::string& key, const std::string& value);

std::string format_csv(const std::vector<EvidenceRow>& rows);
std::vector<EvidenceRow> parse_csv(const std::string& text);

/// Value of `key` in a row's params, or "" if absent.
std::string param_value(const EvidenceRow& row, const std::string& key);

// ---------------------------------------------------------------- worker pool

/// Runs fn(i) for i in [0, count) on up to `jobs` threads; results are in index order.
template <class T>
std::vector<T> parallel_map(std::size_t count, int jobs, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(count);
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs))));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

// ---------------------------------------------------------------- ball maps and samplers

/// Involutive ball automorphism exchanging 0 and a.
CVec mobius(const CVec& a, const CVec& z);
/// Haar-random unitary from a complex Gaussian QR.
CMat random_unitary(int n, std::mt19937_64& rng);
/// Non-holomorphic sphere diffeomorphism z -> normalize(2 Re z1 + i Im z1, z2, ...).
CVec stretch_map(const CVec& z);

/// Boundary point at approximate CC distance `scale` from p along a model geodesic direction.
struct HeisenbergSample {
    CVec q;
    CVec W;
    double V = 0.0;
};
HeisenbergSample heisenberg_sample(const DefiningFunction& phi, const CVec& p, double scale, std::mt19937_64& rng,
                                   int segments = 48);
/// Same, with the unit-gauge direction (W, V) supplied.
CVec heisenberg_point(const DefiningFunction& phi, const CVec& p, const CVec& W, double V, double scale, int segments = 48);

// ---------------------------------------------------------------- scenarios

struct RunContext {
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct ScenarioOutput {
    std::vector<EvidenceRow> rows;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

const std::vector<std::string>& scenario_names();
ScenarioOutput run_scenario(const std::string& name, const Config& cfg, const RunContext& ctx);

/// Oracle sanity rows (triangle inequality and unitary invariance of the ball oracle).
std::vector<EvidenceRow> oracle_sanity_rows(const Config& cfg, const RunContext& ctx);

/// Writes <dir>/<name>.csv and <dir>/<name>.json; returns true iff every row passes.
bool write_scenario_outputs(const std::string& name, const Config& cfg, const RunContext& ctx, const ScenarioOutput& out,
                            const std::string& dir, double runtime_seconds);

/// Per-module source hashes recorded at configure time.
const std::vector<std::pair<std::string, std::string>>& module_hashes();

}  // namespace visualmetrics
