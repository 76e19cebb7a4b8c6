#pragma once
// Cohorts of weighted connectomes, proportional-threshold masking, flattening
// to feature vectors, and the synthetic cohort generator.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "learnad/common.hpp"

namespace learnad {

class RegionAtlas {
  public:
    explicit RegionAtlas(std::vector<std::string> names);

    // The 84-region Desikan-Killiany parcellation (34 cortical + 8 subcortical
    // regions per hemisphere).
    static RegionAtlas desikan_killiany();

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index)); }
    const std::vector<std::string>& names() const { return names_; }
    std::optional<int> index_of(const std::string& name) const;

    bool operator==(const RegionAtlas& other) const { return names_ == other.names_; }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

// Symmetric, zero-diagonal, nonnegative weight matrix.
class Connectome {
  public:
    // Validates; throws Error on asymmetry, diagonal or sign violations.
    Connectome(int n_regions, std::vector<double> row_major);

    int size() const { return n_; }
    double weight(int i, int j) const { return w_[static_cast<std::size_t>(i * n_ + j)]; }
    double weight(EdgeId e) const { return weight(e.i, e.j); }
    const std::vector<double>& data() const { return w_; }

    bool operator==(const Connectome&) const = default;

  private:
    int n_;
    std::vector<double> w_;
};

enum class Sex { F, M };

struct Subject {
    std::string id;
    Connectome connectome;
    Label diagnosis = Label::CN;
    Sex sex = Sex::F;
    std::string manufacturer;

    bool operator==(const Subject&) const = default;
};

class Cohort {
  public:
    Cohort(RegionAtlas atlas, std::vector<Subject> subjects);

    const RegionAtlas& atlas() const { return atlas_; }
    const std::vector<Subject>& subjects() const { return subjects_; }
    std::size_t size() const { return subjects_.size(); }
    int n_regions() const { return atlas_.size(); }

    // Subset in the given order; indices refer to subjects().
    Cohort subset(const std::vector<std::size_t>& indices) const;

    bool operator==(const Cohort&) const = default;

  private:
    RegionAtlas atlas_;
    std::vector<Subject> subjects_;
};

struct EdgeMask {
    std::vector<EdgeId> kept;  // canonical order
    double keep_ratio = 1.0;
};

struct FeatureVector {
    std::string subject_id;
    std::vector<double> values;  // one per kept edge, canonical order
    Label label = Label::CN;
};

// Reads the JSON manifest and the per-subject CSV matrices it references.
Cohort load_cohort(const std::filesystem::path& manifest_path);

// Writes manifest.json plus matrices/<id>.csv under `dir`. Values are printed
// in shortest round-trip form so a reload is bit-identical.
void save_cohort(const Cohort& cohort, const std::filesystem::path& dir);

// Parses one CSV connectome; `n_regions` is the expected dimension.
Connectome read_matrix_csv(const std::filesystem::path& path, int n_regions);

EdgeMask compute_mask(const Cohort& cohort, double keep_ratio);

std::vector<FeatureVector> apply_mask(const Cohort& cohort, const EdgeMask& mask);

void save_mask(const EdgeMask& mask, const std::filesystem::path& path);
EdgeMask load_mask(const std::filesystem::path& path, int n_regions = kRegionCount);

enum class PlantDirection {
    ad_below,  // AD strengths lie below the threshold
    ad_above,
};

struct PlantedEdge {
    EdgeId edge;
    double threshold = 1.0;
    PlantDirection direction = PlantDirection::ad_below;
};

// Parses "i,j,thr,dir" where dir is one of lt/below/< or gt/above/>.
PlantedEdge parse_planted(const std::string& text);

struct SyntheticSpec {
    std::uint64_t seed = 7;
    int n_per_class = 100;
    std::vector<PlantedEdge> planted;
    double noise_rate = 0.0;
};

Cohort generate_synthetic(const SyntheticSpec& spec);

}  // namespace learnad
