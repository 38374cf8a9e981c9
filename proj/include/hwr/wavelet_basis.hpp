#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hwr {

// Sorted, 0-based variable indices. Printed 1-based.
using Subset = std::vector<int>;

std::string subset_label(const Subset& u);  // "{1,5}", "{}" for the empty set
Subset parse_subset_label(const std::string& s);

struct WaveletIndex {
    std::vector<int> j;        // level per dimension, -1 = constant
    std::vector<long long> k;  // translation per dimension
    bool operator==(const WaveletIndex&) const = default;
};

Subset anova_class(const std::vector<int>& j);

// Level budget per ANOVA term.
struct TermSpec {
    Subset u;
    int level;
};

struct LevelBlock {
    std::size_t term;
    std::vector<int> j;                // full d-vector
    std::size_t offset;
    std::size_t size;
    std::vector<std::size_t> strides;  // per position in u; last position varies fastest
};

struct TermSlice {
    Subset u;
    int level;
    std::size_t offset;
    std::size_t size;
    std::vector<std::size_t> blocks;
};

class IndexSet {
public:
    IndexSet() = default;
    IndexSet(int d, std::vector<TermSpec> terms);

    int dim() const { return d_; }
    int max_level() const { return n_; }
    std::size_t size() const { return total_; }
    const std::vector<TermSlice>& terms() const { return terms_; }
    const std::vector<LevelBlock>& blocks() const { return blocks_; }
    const TermSlice* find_term(const Subset& u) const;

    WaveletIndex entry(std::size_t column) const;
    std::vector<WaveletIndex> entries() const;
    std::optional<std::size_t> column_of(const WaveletIndex& idx) const;
    std::vector<Subset> subsets() const;

    nlohmann::json to_json() const;
    static IndexSet from_json(const nlohmann::json& j);

private:
    int d_ = 0;
    int n_ = 0;
    std::size_t total_ = 0;
    std::vector<TermSlice> terms_;
    std::vector<LevelBlock> blocks_;
    std::map<std::vector<int>, std::size_t> block_of_;
};

// All subsets of [d] with |u| <= nu, including the empty set, in canonical order.
std::vector<Subset> subsets_up_to(int d, int nu);
// Canonical order: cardinality, then lexicographic.
void sort_subsets(std::vector<Subset>& U);

IndexSet build_index_set(int d, int n, const std::vector<Subset>& U);
IndexSet build_index_set(int d, const std::vector<TermSpec>& terms);

// Map to [-1/2, 1/2).
inline double wrap_torus(double x) {
    double w = x - std::floor(x + 0.5);
    if (w >= 0.5) w -= 1.0;
    if (w < -0.5) w += 1.0;
    return w;
}

struct Translate {
    long long k;
    double value;
};

// Nonzero translates of the periodized level-j wavelet at x, with values.
// Writes at most 2m-1 entries into out; returns the count.
int active_translates(int m, int j, double x, Translate* out);
std::vector<long long> active_translates(int m, int j, double x);

double eval_periodic(int m, int j, long long k, double x);
double eval_basis(int m, const WaveletIndex& idx, const double* x);
double eval_basis(int m, const WaveletIndex& idx, const std::vector<double>& x);

}  // namespace hwr
