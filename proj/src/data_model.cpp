#include "learnad/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "learnad/format.hpp"

namespace learnad {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// RegionAtlas
// ---------------------------------------------------------------------------

RegionAtlas::RegionAtlas(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() < 2) throw Error("atlas needs at least two regions");
    for (std::size_t k = 0; k < names_.size(); ++k) {
        if (!index_.emplace(names_[k], static_cast<int>(k)).second) {
            throw Error("duplicate atlas label '" + names_[k] + "'");
        }
    }
}

RegionAtlas RegionAtlas::desikan_killiany() {
    static const char* const cortical[] = {
        "bankssts",          "caudalanteriorcingulate", "caudalmiddlefrontal",
        "cuneus",            "entorhinal",              "fusiform",
        "inferiorparietal",  "inferiortemporal",        "isthmuscingulate",
        "lateraloccipital",  "lateralorbitofrontal",    "lingual",
        "medialorbitofrontal", "middletemporal",        "parahippocampal",
        "paracentral",       "parsopercularis",         "parsorbitalis",
        "parstriangularis",  "pericalcarine",           "postcentral",
        "posteriorcingulate", "precentral",             "precuneus",
        "rostralanteriorcingulate", "rostralmiddlefrontal", "superiorfrontal",
        "superiorparietal",  "superiortemporal",        "supramarginal",
        "frontalpole",       "temporalpole",            "transversetemporal",
        "insula"};
    static const char* const subcortical[] = {
        "Thalamus", "Caudate", "Putamen", "Pallidum",
        "Hippocampus", "Amygdala", "Accumbens-area", "Cerebellum-Cortex"};

    std::vector<std::string> names;
    names.reserve(kRegionCount);
    for (const char* c : cortical) names.push_back(std::string("ctx-lh-") + c);
    for (const char* s : subcortical) names.push_back(std::string("Left-") + s);
    for (const char* s : subcortical) names.push_back(std::string("Right-") + s);
    for (const char* c : cortical) names.push_back(std::string("ctx-rh-") + c);
    return RegionAtlas(std::move(names));
}

std::optional<int> RegionAtlas::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Connectome / Cohort
// ---------------------------------------------------------------------------

Connectome::Connectome(int n_regions, std::vector<double> row_major)
    : n_(n_regions), w_(std::move(row_major)) {
    const auto n = static_cast<std::size_t>(n_);
    if (n_ < 2 || w_.size() != n * n) throw Error("non-square matrix");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = w_[i * n + j];
            if (!std::isfinite(v)) throw Error("non-finite weight");
            if (v < 0.0) {
                throw Error("negative weight at [" + std::to_string(i) + "][" +
                            std::to_string(j) + "]");
            }
        }
        double& d = w_[i * n + i];
        if (std::abs(d) > 1e-12) throw Error("nonzero diagonal at [" + std::to_string(i) + "]");
        d = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double& a = w_[i * n + j];
            double& b = w_[j * n + i];
            if (a == b) continue;
            if (std::abs(a - b) > 1e-9) {
                throw Error("asymmetric matrix at [" + std::to_string(i) + "][" +
                            std::to_string(j) + "]");
            }
            const double avg = (a + b) / 2.0;
            a = avg;
            b = avg;
        }
    }
}

Cohort::Cohort(RegionAtlas atlas, std::vector<Subject> subjects)
    : atlas_(std::move(atlas)), subjects_(std::move(subjects)) {
    if (subjects_.empty()) throw Error("empty cohort");
    std::set<std::string> ids;
    for (const auto& s : subjects_) {
        if (s.connectome.size() != atlas_.size()) {
            throw Error("subject '" + s.id + "' connectome dimension does not match atlas");
        }
        if (!ids.insert(s.id).second) throw Error("duplicate subject id '" + s.id + "'");
    }
}

Cohort Cohort::subset(const std::vector<std::size_t>& indices) const {
    std::vector<Subject> out;
    out.reserve(indices.size());
    for (std::size_t k : indices) out.push_back(subjects_.at(k));
    return Cohort(atlas_, std::move(out));
}

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view sex_name(Sex s) { return s == Sex::F ? "F" : "M"; }

Sex parse_sex(const std::string& s) {
    if (s == "F") return Sex::F;
    if (s == "M") return Sex::M;
    throw Error("unknown sex '" + s + "'");
}

}  // namespace

Connectome read_matrix_csv(const fs::path& path, int n_regions) {
    std::ifstream in(path);
    if (!in) throw Error("missing file: " + path.string());

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = view.find(',', start);
            std::string_view cell = trim(view.substr(start, comma == std::string_view::npos
                                                                ? std::string_view::npos
                                                                : comma - start));
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw Error("malformed value '" + std::string(cell) + "' in " + path.string());
            }
            row.push_back(v);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    const std::size_t n_rows = rows.size();
    for (const auto& r : rows) {
        if (r.size() != n_rows) throw Error("non-square matrix in " + path.string());
    }
    if (n_rows != static_cast<std::size_t>(n_regions)) {
        throw Error("matrix dimension " + std::to_string(n_rows) + " does not match atlas size " +
                    std::to_string(n_regions) + " in " + path.string());
    }
    std::vector<double> flat;
    flat.reserve(n_rows * n_rows);
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    try {
        return Connectome(n_regions, std::move(flat));
    } catch (const Error& e) {
        throw Error(std::string(e.what()) + " in " + path.string());
    }
}

Cohort load_cohort(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw Error("missing file: " + manifest_path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
    try {
        RegionAtlas atlas(doc.at("atlas").get<std::vector<std::string>>());
        const fs::path base = manifest_path.parent_path();
        std::vector<Subject> subjects;
        for (const auto& entry : doc.at("subjects")) {
            const auto rel = entry.at("matrix").get<std::string>();
            subjects.push_back(Subject{
                entry.at("id").get<std::string>(),
                read_matrix_csv(base / rel, atlas.size()),
                parse_label(entry.at("diagnosis").get<std::string>()),
                parse_sex(entry.at("sex").get<std::string>()),
                entry.at("manufacturer").get<std::string>(),
            });
        }
        return Cohort(std::move(atlas), std::move(subjects));
    } catch (const json::exception& e) {
        throw Error("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
}

void save_cohort(const Cohort& cohort, const fs::path& dir) {
    fs::create_directories(dir / "matrices");
    json manifest;
    manifest["atlas"] = cohort.atlas().names();
    manifest["subjects"] = json::array();
    const int n = cohort.n_regions();
    for (const auto& s : cohort.subjects()) {
        const std::string rel = "matrices/" + s.id + ".csv";
        std::ofstream out(dir / rel);
        if (!out) throw Error("cannot write " + (dir / rel).string());
        std::string line;
        for (int i = 0; i < n; ++i) {
            line.clear();
            for (int j = 0; j < n; ++j) {
                if (j) line += ',';
                line += format_double(s.connectome.weight(i, j));
            }
            line += '\n';
            out << line;
        }
        manifest["subjects"].push_back({{"id", s.id},
                                        {"diagnosis", std::string(label_name(s.diagnosis))},
                                        {"sex", std::string(sex_name(s.sex))},
                                        {"manufacturer", s.manufacturer},
                                        {"matrix", rel}});
    }
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Masking
// ---------------------------------------------------------------------------

EdgeMask compute_mask(const Cohort& cohort, double keep_ratio) {
    if (!(keep_ratio > 0.0 && keep_ratio <= 1.0)) {
        throw Error("keep_ratio must lie in (0, 1]");
    }
    if (cohort.size() == 0) throw Error("empty cohort");

    const std::vector<EdgeId> edges = all_edges(cohort.n_regions());
    struct Stat {
        std::size_t present = 0;
        double sum = 0.0;
    };
    std::vector<Stat> stats(edges.size());
    for (const auto& s : cohort.subjects()) {
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const double w = s.connectome.weight(edges[e]);
            if (w > 0.0) ++stats[e].present;
            stats[e].sum += w;
        }
    }

    std::vector<std::size_t> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    // Occurrence counts compare exactly as integers; mean weights share the
    // denominator so comparing sums is equivalent.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (stats[a].present != stats[b].present) return stats[a].present > stats[b].present;
        if (stats[a].sum != stats[b].sum) return stats[a].sum > stats[b].sum;
        return edges[a] < edges[b];
    });

    const double exact = keep_ratio * static_cast<double>(edges.size());
    auto n_keep = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    n_keep = std::clamp<std::size_t>(n_keep, 1, edges.size());

    EdgeMask mask;
    mask.keep_ratio = keep_ratio;
    mask.kept.reserve(n_keep);
    for (std::size_t k = 0; k < n_keep; ++k) mask.kept.push_back(edges[order[k]]);
    std::sort(mask.kept.begin(), mask.kept.end());
    return mask;
}

std::vector<FeatureVector> apply_mask(const Cohort& cohort, const EdgeMask& mask) {
    if (mask.kept.empty()) throw Error("empty feature space");
    std::vector<FeatureVector> out;
    out.reserve(cohort.size());
    for (const auto& s : cohort.subjects()) {
        FeatureVector fv{s.id, {}, s.diagnosis};
        fv.values.reserve(mask.kept.size());
        for (EdgeId e : mask.kept) {
            if (e.j >= cohort.n_regions()) throw Error("mask edge outside the cohort atlas");
            fv.values.push_back(s.connectome.weight(e));
        }
        out.push_back(std::move(fv));
    }
    return out;
}

void save_mask(const EdgeMask& mask, const fs::path& path) {
    json pairs = json::array();
    for (EdgeId e : mask.kept) pairs.push_back({e.i, e.j});
    write_text_file(path, pairs.dump() + "\n");
}

EdgeMask load_mask(const fs::path& path, int n_regions) {
    const json doc = read_json_file(path);
    EdgeMask mask;
    try {
        for (const auto& p : doc) {
            mask.kept.push_back(make_edge(p.at(0).get<int>(), p.at(1).get<int>(), n_regions));
        }
    } catch (const json::exception& e) {
        throw Error("malformed mask file " + path.string() + ": " + e.what());
    }
    std::sort(mask.kept.begin(), mask.kept.end());
    if (std::adjacent_find(mask.kept.begin(), mask.kept.end()) != mask.kept.end()) {
        throw Error("duplicate edge in mask file " + path.string());
    }
    mask.keep_ratio =
        static_cast<double>(mask.kept.size()) / static_cast<double>(edge_count(n_regions));
    return mask;
}

// ---------------------------------------------------------------------------
// Synthetic cohorts
// ---------------------------------------------------------------------------

PlantedEdge parse_planted(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.emplace_back(trim(item));
    if (parts.size() != 4) throw Error("planted edge must be i,j,threshold,direction: '" + text + "'");
    PlantedEdge p;
    try {
        p.edge = make_edge(std::stoi(parts[0]), std::stoi(parts[1]));
        p.threshold = std::stod(parts[2]);
    } catch (const std::logic_error&) {
        throw Error("malformed planted edge '" + text + "'");
    }
    const std::string& dir = parts[3];
    if (dir == "lt" || dir == "below" || dir == "<") {
        p.direction = PlantDirection::ad_below;
    } else if (dir == "gt" || dir == "above" || dir == ">") {
        p.direction = PlantDirection::ad_above;
    } else {
        throw Error("unknown planted direction '" + dir + "'");
    }
    return p;
}

Cohort generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_per_class < 1) throw Error("n_per_class must be >= 1");
    if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 0.5)) {
        throw Error("noise_rate must lie in [0, 0.5)");
    }
    std::set<EdgeId> seen;
    for (const auto& p : spec.planted) {
        if (!(p.threshold > 0.0)) throw Error("planted threshold must be positive");
        if (!seen.insert(p.edge).second) {
            throw Error("duplicate planted edge " + edge_to_string(p.edge));
        }
    }

    const RegionAtlas atlas = RegionAtlas::desikan_killiany();
    const int n = atlas.size();
    const auto un = static_cast<std::size_t>(n);
    const std::vector<EdgeId> edges = all_edges(n);

    static const Sex sexes[] = {Sex::F, Sex::F, Sex::M, Sex::M};
    static const char* const makers[] = {"MfrA", "MfrB", "MfrA", "MfrB"};

    std::vector<Subject> subjects;
    subjects.reserve(static_cast<std::size_t>(2 * spec.n_per_class));
    for (Label label : {Label::AD, Label::CN}) {
        const std::uint64_t class_tag = label == Label::AD ? 1 : 2;
        for (int k = 0; k < spec.n_per_class; ++k) {
            Rng rng(derive_seed(spec.seed, class_tag, static_cast<std::uint64_t>(k)));
            // A noisy subject draws its planted strengths from the other class's side.
            const bool flipped = rng.uniform01() < spec.noise_rate;
            std::vector<double> w(un * un, 0.0);
            for (EdgeId e : edges) {
                const double v = std::exp(0.5 * rng.normal());
                w[static_cast<std::size_t>(e.i) * un + static_cast<std::size_t>(e.j)] = v;
                w[static_cast<std::size_t>(e.j) * un + static_cast<std::size_t>(e.i)] = v;
            }
            for (const auto& p : spec.planted) {
                const bool ad_side = (label == Label::AD) != flipped;
                const bool below = ad_side == (p.direction == PlantDirection::ad_below);
                const double v = below ? p.threshold * rng.uniform(0.6, 0.95)
                                       : p.threshold * rng.uniform(1.05, 1.4);
                const auto i = static_cast<std::size_t>(p.edge.i);
                const auto j = static_cast<std::size_t>(p.edge.j);
                w[i * un + j] = v;
                w[j * un + i] = v;
            }
            char id[32];
            std::snprintf(id, sizeof id, "syn_%s_%03d", label == Label::AD ? "ad" : "cn", k);
            const auto combo = static_cast<std::size_t>(k % 4);
            subjects.push_back(Subject{id, Connectome(n, std::move(w)), label, sexes[combo],
                                       makers[combo]});
        }
    }
    return Cohort(atlas, std::move(subjects));
}

}  // namespace learnad
