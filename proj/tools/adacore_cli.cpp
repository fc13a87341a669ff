// adacore command-line harness.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data or format
// error. Reports are JSON (default) or CSV, on stdout unless --out names a
// report file.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adacore/adacore.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace adacore;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// IO failures carry the file name; they count as data errors.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::byte> read_bytes(const fs::path& p) {
  try {
    return container::read_file(p);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

void write_bytes(const fs::path& p, std::span<const std::byte> b) {
  try {
    container::write_file(p, b);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

// Format errors are re-thrown with the file name prepended.
template <typename F>
auto decode(const fs::path& p, F&& f) {
  const auto bytes = read_bytes(p);
  try {
    return f(std::span<const std::byte>(bytes));
  } catch (const FormatError& e) {
    throw FormatError(p.string() + ": " + e.what(), e.offset());
  }
}

Segment load_raw(const fs::path& p) {
  return decode(p, [](std::span<const std::byte> b) { return container::decode_raw(b); });
}

CompressedSegment load_container(const fs::path& p) {
  return decode(p, [](std::span<const std::byte> b) { return container::deserialize(b); });
}

bool looks_like_container(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::equal(magic, magic + 4, container::kMagic.begin());
}

double round1(double v) { return std::round(v * 10.0) / 10.0; }

std::string csv_cell(const ordered_json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

// CSV rendering: an array of flat objects becomes a table; an object becomes
// one row of its scalar fields.
std::string to_csv(const ordered_json& rows) {
  std::ostringstream out;
  auto emit = [&](const ordered_json& table) {
    if (table.empty()) return;
    bool first = true;
    for (const auto& [k, v] : table.front().items()) {
      if (v.is_structured()) continue;
      out << (first ? "" : ",") << k;
      first = false;
    }
    out << '\n';
    for (const auto& row : table) {
      first = true;
      for (const auto& [k, v] : table.front().items()) {
        if (v.is_structured()) continue;
        out << (first ? "" : ",") << (row.contains(k) ? csv_cell(row[k]) : "");
        first = false;
      }
      out << '\n';
    }
  };
  if (rows.is_array()) {
    emit(rows);
  } else {
    emit(ordered_json::array({rows}));
  }
  return out.str();
}

void emit_report(const ordered_json& report, const ordered_json& csv_rows, const std::string& format,
                 const std::string& out_path) {
  const std::string text = format == "csv" ? to_csv(csv_rows) : report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + out_path);
  out << text;
}

Preset require_preset(const std::string& name) {
  if (auto p = find_preset(name)) return *p;
  throw ParameterError("unknown preset '" + name + "'; available: " + preset_names());
}

ordered_json fidelity_json(const metrics::FidelityReport& f, std::size_t margin) {
  return {{"interior_margin", margin},
          {"pearson_r", f.mean_pearson},
          {"snr_db", f.mean_snr_db},
          {"psd_cosine", f.mean_psd_cosine},
          {"per_channel", {{"pearson_r", f.pearson}, {"snr_db", f.snr_db}, {"psd_cosine", f.psd_cosine}}},
          {"conventions",
           "pearson 0 on zero variance; psd cosine 1 when both spectra vanish; snr capped at +/-100 dB"}};
}

ordered_json compression_json(const CompressionResult& r) {
  const auto& cs = r.compressed;
  return {{"length", cs.length},
          {"channels", cs.channels},
          {"sample_rate", cs.sample_rate},
          {"target_keep_ratio", r.target_keep_ratio},
          {"rate_u", cs.rate.num},
          {"rate_d", cs.rate.den},
          {"low_rate_length", cs.low_rate_length},
          {"protected_count", cs.protected_indices.size()},
          {"stored_scalars", cost(cs)},
          {"raw_scalars", cs.length * cs.channels},
          {"realized_keep_ratio", r.realized_keep_ratio()},
          {"budget_overshoot", r.budget_overshoot},
          {"saliency_fallback", r.saliency_fallback}};
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (text.empty() || text == "-") return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParameterError("bad " + what + " value '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) throw ParameterError("bad " + what + " value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------- commands

struct Common {
  std::string preset = "isruc";
  double ratio = 0.15;
  std::uint32_t dmax = kDefaultMaxDenominator;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

int cmd_presets(const Common& o) {
  ordered_json all = ordered_json::array();
  ordered_json rows = ordered_json::array();
  for (const auto& p : presets()) {
    const auto& s = p.saliency;
    ordered_json bands = ordered_json::array();
    std::string band_text;
    for (const auto& b : s.bands) {
      bands.push_back({b.low_hz, b.high_hz});
      band_text += (band_text.empty() ? "" : ";") + std::to_string(b.low_hz) + "-" + std::to_string(b.high_hz);
    }
    const char* stat = s.weight_stat == WeightStatistic::median ? "median" : "trimmed_mean";
    all.push_back({{"name", p.name},
                   {"sample_rate", p.sample_rate},
                   {"bands_hz", bands},
                   {"top_k", s.top_k},
                   {"weight_stat", stat},
                   {"trim_fraction", s.trim_fraction},
                   {"gamma", s.gamma},
                   {"kappa", s.kappa},
                   {"phi", s.phi},
                   {"rho_seconds", s.rho_seconds},
                   {"smooth_seconds", s.smooth_seconds},
                   {"stride", s.stride},
                   {"kaiser_beta", s.kaiser_beta}});
    auto row = all.back();
    row.erase("bands_hz");
    row["bands_hz"] = band_text;
    rows.push_back(row);
  }
  emit_report({{"presets", all}}, rows, o.format, o.out);
  return 0;
}

struct GenOptions {
  double sample_rate = 0.0;  // 0: take it from the preset
  std::size_t length = 3000;
  std::size_t channels = 1;
  double noise = 0.0;
  std::vector<std::string> events;
  std::string output;
};

int cmd_gen_synthetic(const Common& o, const GenOptions& g) {
  synthetic::FixtureSpec spec;
  spec.sample_rate = g.sample_rate > 0.0 ? g.sample_rate : require_preset(o.preset).sample_rate;
  spec.length = g.length;
  spec.channels = g.channels;
  spec.noise_level = g.noise;
  spec.seed = o.seed;
  for (const auto& text : g.events) {
    const auto v = parse_list(text, "event");
    if (v.size() != 4) throw ParameterError("event needs center,duration,frequency,amplitude: '" + text + "'");
    spec.events.push_back({v[0], v[1], v[2], v[3]});
  }
  const auto fx = synthetic::generate(spec);
  write_bytes(g.output, container::encode_raw(fx.segment));

  ordered_json events = ordered_json::array();
  for (std::size_t k = 0; k < fx.events.size(); ++k) {
    const auto& e = spec.events[k];
    events.push_back({{"begin", fx.events[k].begin},
                      {"end", fx.events[k].end},
                      {"center_seconds", e.center_seconds},
                      {"duration_seconds", e.duration_seconds},
                      {"frequency_hz", e.frequency_hz},
                      {"amplitude", e.amplitude}});
  }
  const std::string sidecar = g.output + ".events.json";
  {
    std::ofstream side(sidecar, std::ios::trunc);
    if (!side) throw IoError("cannot write " + sidecar);
    side << ordered_json{{"events", events}}.dump(2) << '\n';
  }
  ordered_json report{{"output", g.output},
                      {"events_file", sidecar},
                      {"sample_rate", spec.sample_rate},
                      {"length", spec.length},
                      {"channels", spec.channels},
                      {"noise_level", spec.noise_level},
                      {"seed", spec.seed},
                      {"events", events}};
  auto row = report;
  row.erase("events");
  row["event_count"] = events.size();
  emit_report(report, row, o.format, o.out);
  return 0;
}

int cmd_compress(const Common& o, const std::string& input, const std::string& output) {
  const auto preset = require_preset(o.preset);
  const auto seg = load_raw(input);
  const auto res = codec::compress(seg, o.ratio, preset.saliency, o.dmax);
  write_bytes(output, container::serialize(res.compressed));
  auto report = compression_json(res);
  report["input"] = input;
  report["output"] = output;
  report["preset"] = preset.name;
  report["bytes"] = container::serialized_size(res.compressed);
  report["stored_percent_of_raw"] = round1(100.0 * static_cast<double>(cost(res.compressed)) /
                                           static_cast<double>(seg.length() * seg.channels()));
  emit_report(report, report, o.format, o.out);
  return 0;
}

int cmd_reconstruct(const Common& o, const std::string& input, const std::string& output,
                    const std::string& original) {
  const auto cs = load_container(input);
  const auto rec = codec::reconstruct(cs);
  write_bytes(output, container::encode_raw(rec.segment));
  ordered_json report{{"input", input},
                      {"output", output},
                      {"length", rec.segment.length()},
                      {"channels", rec.segment.channels()},
                      {"rate_u", cs.rate.num},
                      {"rate_d", cs.rate.den},
                      {"used_fallback", rec.used_fallback},
                      {"fallback_reason", rec.fallback_reason}};
  ordered_json row = report;
  if (!original.empty()) {
    const auto ref = load_raw(original);
    if (ref.channels() != rec.segment.channels() || ref.length() != rec.segment.length()) {
      throw LengthError("original " + original + " does not match the reconstruction's shape");
    }
    std::size_t margin = codec::edge_margin(cs.rate);
    if (2 * margin >= ref.length()) margin = 0;
    const auto f = metrics::fidelity(ref, rec.segment, margin);
    report["fidelity"] = fidelity_json(f, margin);
    row["interior_margin"] = margin;
    row["pearson_r"] = f.mean_pearson;
    row["snr_db"] = f.mean_snr_db;
    row["psd_cosine"] = f.mean_psd_cosine;
  }
  emit_report(report, row, o.format, o.out);
  return 0;
}

int cmd_sweep(const Common& o, const std::vector<std::string>& inputs, const std::vector<double>& ratios) {
  const auto preset = require_preset(o.preset);
  for (double r : ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw ParameterError("sweep ratios must lie in (0, 1]");
  }
  std::vector<std::optional<Segment>> segments;
  ordered_json failures = ordered_json::array();
  for (const auto& path : inputs) {
    try {
      segments.emplace_back(load_raw(path));
    } catch (const std::exception& e) {
      segments.emplace_back(std::nullopt);
      failures.push_back({{"file", path}, {"ratio", nullptr}, {"error", e.what()}});
    }
  }
  ordered_json rows = ordered_json::array();
  for (double r : ratios) {
    double pearson = 0.0, snr = 0.0, psd = 0.0, realized = 0.0;
    double lo = INFINITY, hi = -INFINITY;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (!segments[i]) continue;
      try {
        const auto& seg = *segments[i];
        const auto res = codec::compress(seg, r, preset.saliency, o.dmax);
        const auto rec = codec::reconstruct(res.compressed);
        std::size_t margin = codec::edge_margin(res.compressed.rate);
        if (2 * margin >= seg.length()) margin = 0;
        const auto f = metrics::fidelity(seg, rec.segment, margin);
        pearson += f.mean_pearson;
        snr += f.mean_snr_db;
        psd += f.mean_psd_cosine;
        const double k = res.realized_keep_ratio();
        realized += k;
        lo = std::min(lo, k);
        hi = std::max(hi, k);
        ++ok;
      } catch (const std::exception& e) {
        failures.push_back({{"file", inputs[i]}, {"ratio", r}, {"error", e.what()}});
      }
    }
    const double n = static_cast<double>(ok);
    ordered_json row{{"ratio", r}, {"segments", ok}};
    if (ok > 0) {
      row["mean_pearson_r"] = pearson / n;
      row["mean_snr_db"] = snr / n;
      row["mean_psd_cosine"] = psd / n;
      row["mean_realized_keep_ratio"] = realized / n;
      row["min_realized_keep_ratio"] = lo;
      row["max_realized_keep_ratio"] = hi;
    } else {
      for (const char* k : {"mean_pearson_r", "mean_snr_db", "mean_psd_cosine", "mean_realized_keep_ratio",
                            "min_realized_keep_ratio", "max_realized_keep_ratio"}) {
        row[k] = nullptr;
      }
    }
    rows.push_back(row);
  }
  for (const auto& f : failures) std::cerr << "warning: " << f["file"].get<std::string>() << ": "
                                           << f["error"].get<std::string>() << '\n';
  ordered_json report{{"preset", preset.name}, {"dmax", o.dmax}, {"rows", rows}, {"failures", failures}};
  emit_report(report, rows, o.format, o.out);
  const bool any = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r["segments"] > 0; });
  return any ? 0 : kExitData;
}

struct SimOptions {
  BufferConfig buffer;
  std::size_t batch = 10;
  std::string save_dir;
};

struct ManifestRow {
  std::size_t line = 0;
  fs::path path;
  int label = 0;
  Provenance provenance = Provenance::true_labeled;
  std::vector<double> confidences;
  std::vector<double> feature;
};

// path <TAB> label <TAB> true|pseudo <TAB> c1,c2,... <TAB> f1,f2,...
// Blank lines and lines starting with '#' are ignored.
ManifestRow parse_manifest_row(const std::string& line, std::size_t line_no, const fs::path& base) {
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string col;
  while (std::getline(ss, col, '\t')) cols.push_back(col);
  if (cols.size() != 5) throw ParameterError("expected 5 tab-separated columns, got " + std::to_string(cols.size()));
  ManifestRow row;
  row.line = line_no;
  row.path = fs::path(cols[0]).is_absolute() ? fs::path(cols[0]) : base / cols[0];
  std::size_t used = 0;
  try {
    row.label = std::stoi(cols[1], &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cols[1].size()) throw ParameterError("bad label '" + cols[1] + "'");
  if (cols[2] == "true") {
    row.provenance = Provenance::true_labeled;
  } else if (cols[2] == "pseudo") {
    row.provenance = Provenance::pseudo_labeled;
  } else {
    throw ParameterError("provenance must be 'true' or 'pseudo', got '" + cols[2] + "'");
  }
  row.confidences = parse_list(cols[3], "confidence");
  row.feature = parse_list(cols[4], "feature");
  return row;
}

int cmd_buffer_sim(const Common& o, const SimOptions& sim, const std::string& manifest_path) {
  const auto preset = require_preset(o.preset);
  if (sim.batch < 1) throw ParameterError("batch size must be >= 1");
  std::ifstream manifest(manifest_path);
  if (!manifest) throw IoError("cannot open " + manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();

  ReplayBuffer buffer(sim.buffer);
  ordered_json events = ordered_json::array();
  std::size_t admitted = 0, rejected = 0, inserted = 0, evicted = 0, skipped = 0;
  auto log_evictions = [&](const std::vector<BufferEntry>& gone) {
    ordered_json tags = ordered_json::array();
    for (const auto& e : gone) tags.push_back(e.tag);
    evicted += gone.size();
    return tags;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    ordered_json ev{{"line", line_no}};
    try {
      const auto row = parse_manifest_row(line, line_no, base);
      BufferEntry e;
      e.payload = looks_like_container(row.path)
                      ? load_container(row.path)
                      : codec::compress(load_raw(row.path), o.ratio, preset.saliency, o.dmax).compressed;
      e.label = row.label;
      e.provenance = row.provenance;
      e.window_confidences = row.confidences;
      e.feature = row.feature;
      e.tag = "line " + std::to_string(line_no);
      ev["entry"] = e.tag;
      ev["cost"] = cost(e);
      if (row.provenance == Provenance::true_labeled) {
        ev["op"] = "insert_true";
        ev["evicted"] = log_evictions(buffer.insert_true(std::move(e)));
        ++inserted;
      } else {
        ev["op"] = "admit_pseudo";
        auto r = buffer.admit_pseudo(std::move(e));
        ev["accepted"] = r.accepted;
        if (r.accepted) {
          ++admitted;
        } else {
          ++rejected;
          ev["reason"] = r.reason;
        }
        ev["evicted"] = log_evictions(r.evicted);
      }
    } catch (const std::exception& ex) {
      ++skipped;
      ev["op"] = "skip";
      ev["reason"] = ex.what();
      std::cerr << "warning: " << manifest_path << ":" << line_no << ": " << ex.what() << '\n';
    }
    ev["true_cost"] = buffer.true_cost();
    ev["pseudo_cost"] = buffer.pseudo_cost();
    events.push_back(ev);
  }

  const auto batch = buffer.sample_replay_batch(sim.batch, o.seed);
  const auto [want_true, want_pseudo] = buffer.batch_split(sim.batch);
  std::size_t got_pseudo = 0, fallbacks = 0;
  for (const auto& item : batch) {
    got_pseudo += item.provenance == Provenance::pseudo_labeled ? 1 : 0;
    fallbacks += item.used_fallback ? 1 : 0;
  }
  ordered_json summary{{"true_entries", buffer.true_entries().size()},
                       {"true_cost", buffer.true_cost()},
                       {"budget_true", sim.buffer.budget_true},
                       {"pseudo_entries", buffer.pseudo_entries().size()},
                       {"pseudo_cost", buffer.pseudo_cost()},
                       {"budget_pseudo", sim.buffer.budget_pseudo},
                       {"true_inserts", inserted},
                       {"pseudo_admitted", admitted},
                       {"pseudo_rejected", rejected},
                       {"evictions", evicted},
                       {"skipped_rows", skipped},
                       {"replay_batch_size", batch.size()},
                       {"replay_true", batch.size() - got_pseudo},
                       {"replay_pseudo", got_pseudo},
                       {"replay_nominal_true", want_true},
                       {"replay_nominal_pseudo", want_pseudo},
                       {"replay_fallbacks", fallbacks},
                       {"seed", o.seed}};
  if (!sim.save_dir.empty()) {
    buffer.save(sim.save_dir);
    summary["saved_to"] = sim.save_dir;
  }
  ordered_json rows = ordered_json::array();
  for (const auto& ev : events) {
    ordered_json r{{"line", ev["line"]}, {"op", ev["op"]}};
    r["entry"] = ev.value("entry", "");
    r["cost"] = ev.contains("cost") ? ev["cost"] : ordered_json(nullptr);
    r["accepted"] = ev.contains("accepted") ? ev["accepted"] : ordered_json(nullptr);
    std::string gone;
    if (ev.contains("evicted")) {
      for (const auto& t : ev["evicted"]) gone += (gone.empty() ? "" : ";") + t.get<std::string>();
    }
    r["evicted"] = gone;
    r["reason"] = ev.value("reason", "");
    r["true_cost"] = ev["true_cost"];
    r["pseudo_cost"] = ev["pseudo_cost"];
    rows.push_back(r);
  }
  emit_report({{"events", events}, {"summary", summary}}, rows, o.format, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saliency-guided EEG segment compression and budgeted replay buffer"};
  app.require_subcommand(1);
  Common o;
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_codec = [&](CLI::App* cmd) {
    cmd->add_option("--preset", o.preset, "Saliency preset: " + preset_names());
    cmd->add_option("--ratio", o.ratio, "Target keep ratio r in (0, 1]");
    cmd->add_option("--dmax", o.dmax, "Largest rate denominator")->check(CLI::Range(1, 65535));
  };

  auto* presets_cmd = app.add_subcommand("presets", "List the saliency presets");
  presets_cmd->add_option("--out", o.out, "Report file (default stdout)");
  add_format(presets_cmd);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic raw segment with known events");
  gen_cmd->add_option("output", gen.output, "Raw segment to write")->required();
  gen_cmd->add_option("--preset", o.preset, "Preset supplying the sample rate");
  gen_cmd->add_option("--fs", gen.sample_rate, "Sample rate in Hz (overrides the preset)");
  gen_cmd->add_option("--length", gen.length, "Samples per channel");
  gen_cmd->add_option("--channels", gen.channels, "Channel count");
  gen_cmd->add_option("--noise", gen.noise, "Background standard deviation");
  gen_cmd->add_option("--event", gen.events, "center_s,duration_s,freq_hz,amplitude (repeatable)");
  gen_cmd->add_option("--seed", o.seed, "Noise and phase seed");
  gen_cmd->add_option("--out", o.out, "Report file (default stdout)");
  add_format(gen_cmd);

  std::string input, output, original;
  auto* compress_cmd = app.add_subcommand("compress", "Compress a raw segment into a .adcr container");
  compress_cmd->add_option("input", input, "Raw segment")->required();
  compress_cmd->add_option("output", output, "Container to write")->required();
  add_codec(compress_cmd);
  compress_cmd->add_option("--out", o.out, "Report file (default stdout)");
  add_format(compress_cmd);

  auto* recon_cmd = app.add_subcommand("reconstruct", "Reconstruct a raw segment from a container");
  recon_cmd->add_option("input", input, "Container")->required();
  recon_cmd->add_option("output", output, "Raw segment to write")->required();
  recon_cmd->add_option("--original", original, "Original raw segment for fidelity metrics");
  recon_cmd->add_option("--out", o.out, "Report file (default stdout)");
  add_format(recon_cmd);

  std::vector<std::string> inputs;
  std::vector<double> ratios;
  auto* sweep_cmd = app.add_subcommand("sweep", "Fidelity against keep ratio over a set of raw segments");
  sweep_cmd->add_option("inputs", inputs, "Raw segments")->required();
  sweep_cmd->add_option("--ratio", ratios, "Keep ratios (comma-separated or repeated)")->delimiter(',')->required();
  sweep_cmd->add_option("--preset", o.preset, "Saliency preset: " + preset_names());
  sweep_cmd->add_option("--dmax", o.dmax, "Largest rate denominator")->check(CLI::Range(1, 65535));
  sweep_cmd->add_option("--out", o.out, "Report file (default stdout)");
  add_format(sweep_cmd);

  SimOptions sim;
  std::string manifest;
  auto* sim_cmd = app.add_subcommand("buffer-sim", "Replay a stream manifest through the replay buffer");
  sim_cmd->add_option("manifest", manifest, "Stream manifest (TSV)")->required();
  add_codec(sim_cmd);
  sim_cmd->add_option("--budget-true", sim.buffer.budget_true, "True partition budget, stored scalars")->required();
  sim_cmd->add_option("--budget-pseudo", sim.buffer.budget_pseudo, "Pseudo partition budget, stored scalars")
      ->required();
  sim_cmd->add_option("--conf-threshold", sim.buffer.conf_threshold, "Window confidence threshold");
  sim_cmd->add_option("--min-windows", sim.buffer.min_windows, "Windows required above the threshold");
  sim_cmd->add_option("--mix-true", sim.buffer.mix_true, "Replay mix, true share");
  sim_cmd->add_option("--mix-pseudo", sim.buffer.mix_pseudo, "Replay mix, pseudo share");
  sim_cmd->add_option("--batch", sim.batch, "Replay batch size");
  sim_cmd->add_option("--seed", o.seed, "Replay sampling seed");
  sim_cmd->add_option("--save", sim.save_dir, "Directory to save the final buffer into");
  sim_cmd->add_option("--out", o.out, "Report file (default stdout)");
  add_format(sim_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*presets_cmd) return cmd_presets(o);
    if (*gen_cmd) return cmd_gen_synthetic(o, gen);
    if (*compress_cmd) return cmd_compress(o, input, output);
    if (*recon_cmd) return cmd_reconstruct(o, input, output, original);
    if (*sweep_cmd) return cmd_sweep(o, inputs, ratios);
    if (*sim_cmd) return cmd_buffer_sim(o, sim, manifest);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << " (byte offset " << e.offset() << ")\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
