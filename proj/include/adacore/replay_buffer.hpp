#pragma once

// Budgeted exemplar store with two independent partitions.
//
// True-labeled entries are ranked by distance to their class prototype
// (mean feature) and the farthest are evicted first. Pseudo-labeled entries
// pass a confidence gate on admission and are ranked by mean window
// confidence. Budgets count stored scalars, see cost().
//
// Not internally synchronized: one writer at a time; const members may run
// concurrently with each other but not with a mutation.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "adacore/codec.hpp"
#include "adacore/container.hpp"
#include "adacore/errors.hpp"
#include "adacore/types.hpp"

namespace adacore {

struct BufferConfig {
  std::size_t budget_true = 0;    // M_true, stored scalars
  std::size_t budget_pseudo = 0;  // M_pseudo, stored scalars
  double conf_threshold = 0.9;    // confidence must exceed this ...
  std::size_t min_windows = 15;   // ... on at least this many windows
  std::size_t mix_true = 8;       // replay ratio true:pseudo
  std::size_t mix_pseudo = 2;
};

struct Prototype {
  int label = 0;
  std::vector<double> mean;
  std::size_t members = 0;
};

struct GateDecision {
  bool accepted = false;
  std::string reason;  // empty when accepted
};

/// Entry plus its insertion sequence number (used for age tie-breaks).
struct StoredEntry {
  BufferEntry entry;
  std::uint64_t sequence = 0;
};

struct AdmissionResult {
  bool accepted = false;
  std::string reason;
  std::vector<BufferEntry> evicted;
};

struct ReplayItem {
  Segment segment;
  int label = 0;
  Provenance provenance = Provenance::true_labeled;
  bool used_fallback = false;
};

inline double mean_confidence(const BufferEntry& e) {
  if (e.window_confidences.empty()) return 0.0;
  return std::accumulate(e.window_confidences.begin(), e.window_confidences.end(), 0.0) /
         static_cast<double>(e.window_confidences.size());
}

/// Accept iff |{w : conf_w > threshold}| >= min_windows.
inline GateDecision confidence_gate(const BufferEntry& e, double threshold, std::size_t min_windows) {
  if (e.window_confidences.empty()) return {false, "malformed: no window confidences"};
  for (double c : e.window_confidences) {
    if (!(c >= 0.0 && c <= 1.0)) return {false, "malformed: confidence outside [0, 1]"};
  }
  const auto passing = static_cast<std::size_t>(
      std::count_if(e.window_confidences.begin(), e.window_confidences.end(),
                    [threshold](double c) { return c > threshold; }));
  if (passing < min_windows) {
    return {false, "low confidence: " + std::to_string(passing) + " of " +
                       std::to_string(e.window_confidences.size()) + " windows above threshold"};
  }
  return {true, {}};
}

/// Coordinate-wise mean of the features; nullopt for an empty set.
inline std::optional<Prototype> compute_prototype(std::span<const BufferEntry* const> members) {
  if (members.empty()) return std::nullopt;
  Prototype p;
  p.label = members.front()->label;
  p.members = members.size();
  const std::size_t dim = members.front()->feature.size();
  p.mean.assign(dim, 0.0);
  for (const auto* e : members) {
    if (e->feature.size() != dim) throw LengthError("feature lengths differ within a class");
    for (std::size_t i = 0; i < dim; ++i) p.mean[i] += e->feature[i];
  }
  for (auto& v : p.mean) v /= static_cast<double>(members.size());
  return p;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

class ReplayBuffer {
 public:
  explicit ReplayBuffer(BufferConfig config) : config_(config) {
    if (!(config_.conf_threshold >= 0.0 && config_.conf_threshold <= 1.0)) {
      throw ParameterError("confidence threshold must lie in [0, 1]");
    }
    if (config_.mix_true + config_.mix_pseudo == 0) throw ParameterError("mix ratio must not be 0:0");
  }

  const BufferConfig& config() const noexcept { return config_; }
  std::span<const StoredEntry> true_entries() const noexcept { return true_; }
  std::span<const StoredEntry> pseudo_entries() const noexcept { return pseudo_; }
  std::size_t true_cost() const { return total_cost(true_); }
  std::size_t pseudo_cost() const { return total_cost(pseudo_); }
  std::size_t size() const noexcept { return true_.size() + pseudo_.size(); }

  /// Adds a true-labeled entry, then evicts if the partition is over budget.
  /// Returns the evicted entries (possibly including the new one).
  std::vector<BufferEntry> insert_true(BufferEntry entry) {
    check_feature(entry);
    entry.provenance = Provenance::true_labeled;
    true_.push_back({std::move(entry), next_sequence_++});
    return evict_true();
  }

  /// Confidence-gated insert into the pseudo partition.
  AdmissionResult admit_pseudo(BufferEntry entry) {
    const auto gate = confidence_gate(entry, config_.conf_threshold, config_.min_windows);
    if (!gate.accepted) return {false, gate.reason, {}};
    check_feature(entry);
    entry.provenance = Provenance::pseudo_labeled;
    pseudo_.push_back({std::move(entry), next_sequence_++});
    return {true, {}, evict_pseudo()};
  }

  /// Prototypes of the current true partition, ordered by label.
  std::vector<Prototype> prototypes() const {
    std::vector<Prototype> out;
    for (const auto& [label, members] : true_by_class()) {
      if (auto p = compute_prototype(members)) out.push_back(std::move(*p));
    }
    return out;
  }

  /// Farthest-from-prototype first (ties: larger cost, then newer) until the
  /// partition fits M_true. Distances use the pre-eviction prototypes.
  std::vector<BufferEntry> evict_true() {
    std::size_t total = true_cost();
    if (total <= config_.budget_true) return {};

    std::map<int, std::vector<double>> centers;
    for (const auto& [label, members] : true_by_class()) {
      if (auto p = compute_prototype(members)) centers[label] = std::move(p->mean);
    }
    struct Ranked {
      std::size_t index;
      double distance;
      std::size_t cost;
      std::uint64_t sequence;
    };
    std::vector<Ranked> ranked;
    for (std::size_t i = 0; i < true_.size(); ++i) {
      const auto& e = true_[i].entry;
      ranked.push_back({i, euclidean_distance(e.feature, centers.at(e.label)), cost(e), true_[i].sequence});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
      if (a.distance != b.distance) return a.distance > b.distance;
      if (a.cost != b.cost) return a.cost > b.cost;
      return a.sequence > b.sequence;
    });

    std::vector<bool> drop(true_.size(), false);
    for (const auto& r : ranked) {
      if (total <= config_.budget_true) break;
      drop[r.index] = true;
      total -= r.cost;
    }
    return remove_marked(true_, drop);
  }

  /// Keeps the longest prefix by mean confidence (ties: lower cost, then
  /// older) whose cumulative cost fits M_pseudo.
  std::vector<BufferEntry> evict_pseudo() {
    if (pseudo_cost() <= config_.budget_pseudo) return {};
    std::vector<std::size_t> order(pseudo_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ca = mean_confidence(pseudo_[a].entry), cb = mean_confidence(pseudo_[b].entry);
      if (ca != cb) return ca > cb;
      const auto ka = cost(pseudo_[a].entry), kb = cost(pseudo_[b].entry);
      if (ka != kb) return ka < kb;
      return pseudo_[a].sequence < pseudo_[b].sequence;
    });
    std::vector<bool> drop(pseudo_.size(), true);
    std::size_t used = 0;
    for (const auto i : order) {
      const auto c = cost(pseudo_[i].entry);
      if (used + c > config_.budget_pseudo) break;
      used += c;
      drop[i] = false;
    }
    return remove_marked(pseudo_, drop);
  }

  /// Mixed replay batch: round(batch * pseudo share) pseudo draws, the rest
  /// true; uniform without replacement within each partition, shortfall
  /// backfilled from the other partition. Entries are decoded on the way out.
  std::vector<ReplayItem> sample_replay_batch(std::size_t batch_size, std::uint64_t seed) const {
    if (batch_size < 1) throw ParameterError("batch size must be >= 1");
    const auto [want_true, want_pseudo] = batch_split(batch_size);
    std::mt19937_64 rng(seed);
    auto true_order = shuffled(true_.size(), rng);
    auto pseudo_order = shuffled(pseudo_.size(), rng);

    std::size_t n_true = std::min(want_true, true_order.size());
    std::size_t n_pseudo = std::min(want_pseudo + (want_true - n_true), pseudo_order.size());
    n_true = std::min(true_order.size(), n_true + (batch_size - n_true - n_pseudo));

    std::vector<ReplayItem> out;
    out.reserve(n_true + n_pseudo);
    auto emit = [&out](const StoredEntry& s) {
      auto rec = codec::reconstruct(s.entry.payload);
      out.push_back({std::move(rec.segment), s.entry.label, s.entry.provenance, rec.used_fallback});
    };
    for (std::size_t i = 0; i < n_true; ++i) emit(true_[true_order[i]]);
    for (std::size_t i = 0; i < n_pseudo; ++i) emit(pseudo_[pseudo_order[i]]);
    return out;
  }

  /// Nominal (true, pseudo) draw counts for a batch, before backfill.
  std::pair<std::size_t, std::size_t> batch_split(std::size_t batch_size) const {
    const double share = static_cast<double>(config_.mix_pseudo) /
                         static_cast<double>(config_.mix_true + config_.mix_pseudo);
    const auto pseudo = static_cast<std::size_t>(std::lround(share * static_cast<double>(batch_size)));
    return {batch_size - pseudo, pseudo};
  }

  /// Writes entry_NNNNN.adcr containers plus index.tsv:
  /// path <TAB> label <TAB> provenance <TAB> mean confidence <TAB> f1,f2,...
  void save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::ofstream index(dir / "index.tsv", std::ios::trunc);
    if (!index) throw std::runtime_error("cannot write " + (dir / "index.tsv").string());
    std::size_t k = 0;
    for (const auto* part : {&true_, &pseudo_}) {
      for (const auto& s : *part) {
        char name[32];
        std::snprintf(name, sizeof(name), "entry_%05zu.adcr", k++);
        container::write_file(dir / name, container::serialize(s.entry.payload));
        const double conf = s.entry.provenance == Provenance::true_labeled && s.entry.window_confidences.empty()
                                ? 1.0
                                : mean_confidence(s.entry);
        index << name << '\t' << s.entry.label << '\t' << to_string(s.entry.provenance) << '\t'
              << format_double(conf) << '\t';
        for (std::size_t i = 0; i < s.entry.feature.size(); ++i) {
          index << (i ? "," : "") << format_double(s.entry.feature[i]);
        }
        index << '\n';
      }
    }
  }

  /// Buffer holding the given entries in order, without gating or eviction.
  static ReplayBuffer restore(BufferConfig config, std::vector<BufferEntry> entries) {
    ReplayBuffer buf(config);
    for (auto& e : entries) {
      buf.check_feature(e);
      auto& part = e.provenance == Provenance::true_labeled ? buf.true_ : buf.pseudo_;
      part.push_back({std::move(e), buf.next_sequence_++});
    }
    return buf;
  }

  /// Restores a saved buffer. Stored pseudo entries were gated when first
  /// admitted and are not re-gated; their confidences collapse to the mean.
  static ReplayBuffer load(const std::filesystem::path& dir, BufferConfig config) {
    std::vector<BufferEntry> entries;
    std::ifstream index(dir / "index.tsv");
    if (!index) throw std::runtime_error("cannot open " + (dir / "index.tsv").string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(index, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string col;
      while (std::getline(ss, col, '\t')) cols.push_back(col);
      if (cols.size() < 4) throw FormatError("index.tsv line " + std::to_string(line_no) + " has too few columns", 0);
      BufferEntry e;
      e.payload = container::deserialize(container::read_file(dir / cols[0]));
      e.label = std::stoi(cols[1]);
      if (cols[2] != "true" && cols[2] != "pseudo") {
        throw FormatError("index.tsv line " + std::to_string(line_no) + ": unknown provenance", 0);
      }
      e.provenance = cols[2] == "true" ? Provenance::true_labeled : Provenance::pseudo_labeled;
      e.window_confidences = {std::stod(cols[3])};
      if (cols.size() > 4 && !cols[4].empty()) {
        std::stringstream fs(cols[4]);
        std::string v;
        while (std::getline(fs, v, ',')) e.feature.push_back(std::stod(v));
      }
      entries.push_back(std::move(e));
    }
    auto buf = restore(config, std::move(entries));
    buf.evict_true();
    buf.evict_pseudo();
    return buf;
  }

 private:
  static std::size_t total_cost(const std::vector<StoredEntry>& part) {
    std::size_t s = 0;
    for (const auto& e : part) s += cost(e.entry);
    return s;
  }

  std::map<int, std::vector<const BufferEntry*>> true_by_class() const {
    std::map<int, std::vector<const BufferEntry*>> by;
    for (const auto& s : true_) by[s.entry.label].push_back(&s.entry);
    return by;
  }

  void check_feature(const BufferEntry& e) {
    if (!feature_dim_) {
      feature_dim_ = e.feature.size();
    } else if (e.feature.size() != *feature_dim_) {
      throw LengthError("feature length " + std::to_string(e.feature.size()) + " differs from buffer's " +
                        std::to_string(*feature_dim_));
    }
  }

  static std::vector<BufferEntry> remove_marked(std::vector<StoredEntry>& part, const std::vector<bool>& drop) {
    std::vector<BufferEntry> evicted;
    std::vector<StoredEntry> kept;
    for (std::size_t i = 0; i < part.size(); ++i) {
      if (drop[i]) {
        evicted.push_back(std::move(part[i].entry));
      } else {
        kept.push_back(std::move(part[i]));
      }
    }
    part = std::move(kept);
    return evicted;
  }

  static std::vector<std::size_t> shuffled(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    return idx;
  }

  static std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  }

  BufferConfig config_;
  std::vector<StoredEntry> true_;
  std::vector<StoredEntry> pseudo_;
  std::optional<std::size_t> feature_dim_;
  std::uint64_t next_sequence_ = 0;
};

}  // namespace adacore
