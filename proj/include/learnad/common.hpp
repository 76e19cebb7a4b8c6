#pragma once
// Shared vocabulary: labels, edge identifiers, errors, deterministic RNG.

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace learnad {

inline constexpr int kRegionCount = 84;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Label { AD, CN };

std::string_view label_name(Label label);
Label parse_label(std::string_view text);

// Unordered region pair stored canonically with i < j. Ordering is the
// canonical edge order used for feature vectors and every tie-break.
struct EdgeId {
    int i = 0;
    int j = 1;

    auto operator<=>(const EdgeId&) const = default;
};

// Canonicalizes (a, b) to i < j; rejects self-edges and out-of-range indices.
EdgeId make_edge(int a, int b, int n_regions = kRegionCount);

std::size_t edge_count(int n_regions);
std::vector<EdgeId> all_edges(int n_regions);
std::string edge_to_string(EdgeId e);

// splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// Deterministic across standard libraries: the distributions are
// implemented here rather than taken from <random>.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform01();                       // [0, 1)
    double uniform(double lo, double hi);     // [lo, hi)
    std::uint64_t below(std::uint64_t bound); // [0, bound), unbiased
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t k = v.size(); k > 1; --k) {
            std::swap(v[k - 1], v[below(k)]);
        }
    }

  private:
    std::uint64_t state_[4];
};

// Runs fn(0..n-1) on up to `threads` workers. Each index is processed exactly
// once; results must be written to index-addressed slots by the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

double mean_of(const std::vector<double>& xs);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_std(const std::vector<double>& xs);

}  // namespace learnad

template <>
struct std::hash<learnad::EdgeId> {
    std::size_t operator()(const learnad::EdgeId& e) const noexcept {
        return static_cast<std::size_t>(e.i) * 131u + static_cast<std::size_t>(e.j);
    }
};
