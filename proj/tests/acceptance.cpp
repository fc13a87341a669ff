// Acceptance checks, one line per criterion. Exit status is the number of
// failed criteria (0 when everything passes).

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "adacore/adacore.hpp"
#include "oracles.hpp"

using namespace adacore;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

synthetic::Fixture burst_fixture(const Preset& p, std::size_t n, std::size_t channels, std::uint64_t seed,
                                 double noise, double amp) {
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  const double seconds = static_cast<double>(n) / p.sample_rate;
  std::uniform_real_distribution<double> center(0.15 * seconds, 0.85 * seconds);
  std::uniform_real_distribution<double> freq(12.0, 15.0);
  synthetic::FixtureSpec spec;
  spec.sample_rate = p.sample_rate;
  spec.length = n;
  spec.channels = channels;
  spec.noise_level = noise;
  spec.seed = seed;
  spec.events = {{center(rng), 1.0, freq(rng), amp}};
  return synthetic::generate(spec);
}

// 1. Realized keep ratio within [r - 1/64, r + phi + 2/N] for every preset.
Outcome storage_accounting() {
  struct Case {
    const char* preset;
    std::size_t n, channels;
  };
  // One epoch per dataset: 30 s sleep, 30 s emotion clip, 4 s motor imagery.
  const Case cases[] = {{"isruc", 3000, 6}, {"faced", 7500, 32}, {"physionet-mi", 640, 64}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto p = *find_preset(c.preset);
    for (double r : {0.15, 0.10, 0.05}) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto fx = burst_fixture(p, c.n, c.channels, seed, 0.3, 1.5);
        const auto res = codec::compress(fx.segment, r, p.saliency);
        const double k = static_cast<double>(cost(res.compressed)) / static_cast<double>(c.n * c.channels);
        lo = std::min(lo, k);
        hi = std::max(hi, k);
        const double upper = r + p.saliency.phi + 2.0 / static_cast<double>(c.n);
        if (k < r - 1.0 / 64.0 || k > upper) ok = false;
      }
      detail += fmt("%s r=%.2f: %.4f-%.4f; ", c.preset, r, lo, hi);
    }
  }
  return {ok, detail};
}

// 2. Polyphase evaluation equals zero-stuff/convolve/decimate.
Outcome polyphase_equivalence() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> len(64, 512);
  std::normal_distribution<float> g;
  double worst = 0.0;
  int pairs = 0;
  for (std::uint32_t u = 1; u <= 8; ++u) {
    for (std::uint32_t d = 1; d <= 8; ++d) {
      if (std::gcd(u, d) != 1) continue;
      ++pairs;
      const RationalRate rate{u, d};
      const auto taps = resample::resampling_kernel(rate).taps;
      for (int k = 0; k < 20; ++k) {
        std::vector<float> x(len(rng));
        for (auto& v : x) v = g(rng);
        const auto fast = resample::polyphase_resample(std::span<const float>(x), rate);
        const auto slow = oracle::naive_resample(std::vector<double>(x.begin(), x.end()), u, d, taps);
        if (fast.size() != slow.size()) return {false, "length mismatch"};
        for (std::size_t i = 0; i < fast.size(); ++i) worst = std::max(worst, std::abs(fast[i] - slow[i]));
      }
    }
  }
  return {worst <= 1e-5, fmt("%d coprime pairs x 20 segments, max |dev| = %.3g (limit 1e-5)", pairs, worst)};
}

// 3. Protected samples are bit-exact through the full container path.
Outcome keyframe_losslessness() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> preset_pick(0, 2);
  std::uniform_int_distribution<std::size_t> channels(1, 8);
  std::uniform_real_distribution<double> ratio(0.03, 1.0);
  std::size_t checked = 0, mismatches = 0, fallbacks = 0;
  for (int k = 0; k < 100; ++k) {
    const auto& p = presets()[static_cast<std::size_t>(preset_pick(rng))];
    std::uniform_int_distribution<std::size_t> len(static_cast<std::size_t>(p.sample_rate * 4),
                                                   static_cast<std::size_t>(p.sample_rate * 30));
    const auto fx = burst_fixture(p, len(rng), channels(rng), static_cast<std::uint64_t>(k), 0.5, 2.0);
    const auto& x = fx.segment;
    CompressionResult res;
    if (k % 2 == 0) {
      res = codec::compress(x, ratio(rng), p.saliency);
    } else {
      // Random keyframes, denser than saliency would pick.
      std::bernoulli_distribution keep(0.05);
      std::vector<std::uint32_t> idx{0};
      for (std::uint32_t t = 1; t + 1 < x.length(); ++t) {
        if (keep(rng)) idx.push_back(t);
      }
      idx.push_back(static_cast<std::uint32_t>(x.length() - 1));
      res = codec::compress_with(x, ProtectedSet(idx, x.length()), ratio(rng), kDefaultMaxDenominator);
    }
    const auto decoded = container::deserialize(container::serialize(res.compressed));
    const auto rec = codec::reconstruct(decoded);
    fallbacks += rec.used_fallback ? 1 : 0;
    for (const auto t : res.compressed.protected_indices) {
      for (std::size_t c = 0; c < x.channels(); ++c) {
        ++checked;
        if (std::bit_cast<std::uint32_t>(rec.segment.at(c, t)) != std::bit_cast<std::uint32_t>(x.at(c, t))) {
          ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0 && fallbacks == 0,
          fmt("100 segments, %zu protected samples, %zu mismatches, %zu fallbacks", checked, mismatches, fallbacks)};
}

// 4. Interior fidelity for sinusoid mixtures well inside the passband.
Outcome band_limited_fidelity() {
  const auto p = *find_preset("isruc");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> amp(0.2, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  bool ok = true;
  std::string detail;
  for (double r : {0.5, 0.25}) {
    // Tones up to 0.6 of the nominal cutoff r * Fs / 2.
    std::uniform_real_distribution<double> freq(0.5, 0.6 * r * p.sample_rate / 2.0);
    double min_r = INFINITY, min_snr = INFINITY;
    for (int k = 0; k < 20; ++k) {
      const std::size_t n = 3000, channels = 2;
      std::vector<float> data;
      for (std::size_t c = 0; c < channels; ++c) {
        std::vector<double> f, a, ph;
        for (int j = 0; j < 4; ++j) {
          f.push_back(freq(rng) / p.sample_rate);
          a.push_back(amp(rng));
          ph.push_back(phase(rng));
        }
        const auto x = oracle::sum_of_sinusoids(n, f, a, ph);
        data.insert(data.end(), x.begin(), x.end());
      }
      const Segment x(channels, n, static_cast<float>(p.sample_rate), std::move(data));
      const auto res = codec::compress(x, r, p.saliency);
      const auto rec = codec::reconstruct(res.compressed);
      const auto f = metrics::fidelity(x, rec.segment, codec::edge_margin(res.compressed.rate));
      min_r = std::min(min_r, *std::min_element(f.pearson.begin(), f.pearson.end()));
      min_snr = std::min(min_snr, *std::min_element(f.snr_db.begin(), f.snr_db.end()));
    }
    if (r == 0.5) {
      ok = ok && min_r >= 0.99 && min_snr >= 20.0;
      detail += fmt("r=0.5: min Pearson %.5f (>= 0.99), min SNR %.1f dB (>= 20); ", min_r, min_snr);
    } else {
      ok = ok && min_r >= 0.95;
      detail += fmt("r=0.25: min Pearson %.5f (>= 0.95)", min_r);
    }
  }
  return {ok, detail};
}

// 5. One spindle-band burst per segment ends up protected.
Outcome saliency_detection() {
  const auto p = *find_preset("isruc");
  // 60 s: at 30 s the cap (150 samples) is smaller than one protection
  // window (2 * 75 + 1 samples), so no peak could ever be admitted.
  const std::size_t n = 6000;
  const std::size_t cap = static_cast<std::size_t>(std::ceil(p.saliency.phi * static_cast<double>(n)));
  std::size_t burst_total = 0, burst_hit = 0, worst_size = 0;
  double worst_fraction = 1.0;
  bool sizes_ok = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto fx = burst_fixture(p, n, 2, seed, 0.3, 1.0);
    const auto res = saliency::analyze(fx.segment, p.saliency);
    const auto [begin, end] = fx.events[0];
    std::size_t hit = 0;
    for (std::size_t t = begin; t < end; ++t) hit += res.protected_set.contains(static_cast<std::uint32_t>(t));
    burst_total += end - begin;
    burst_hit += hit;
    worst_fraction = std::min(worst_fraction, static_cast<double>(hit) / static_cast<double>(end - begin));
    worst_size = std::max(worst_size, res.protected_set.size());
    if (res.protected_set.size() > cap + 2) sizes_ok = false;
  }
  const double fraction = static_cast<double>(burst_hit) / static_cast<double>(burst_total);
  return {fraction >= 0.8 && sizes_ok,
          fmt("20 seeds: %.1f%% of burst samples protected (worst seed %.1f%%), largest |P| %zu <= %zu",
              100.0 * fraction, 100.0 * worst_fraction, worst_size, cap + 2)};
}

// 6. Rate selection equals exhaustive search.
Outcome rational_optimality() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ratio(0.005, 1.0);
  std::uniform_int_distribution<std::uint32_t> len(100, 8000);
  std::size_t approx_bad = 0, refine_bad = 0, total = 0;
  for (int k = 0; k < 200; ++k) {
    const double r = ratio(rng);
    const std::uint32_t n = len(rng);
    std::uniform_int_distribution<std::uint32_t> prot(2, n / 5);
    const std::uint32_t pc = prot(rng);
    for (std::uint32_t dmax : {8u, 64u, 128u}) {
      ++total;
      const auto a = rational::rational_approx(r, dmax);
      if (!(oracle::Rate{a.num, a.den} == oracle::exhaustive_approx(r, dmax))) ++approx_bad;
      const auto f = rational::refine_farey(r, n, pc, dmax);
      if (!(oracle::Rate{f.num, f.den} == oracle::exhaustive_refine(r, n, pc, dmax))) ++refine_bad;
    }
  }
  return {approx_bad == 0 && refine_bad == 0,
          fmt("%zu cases: rational_approx mismatches %zu, refine_farey mismatches %zu", total, approx_bad, refine_bad)};
}

// 7. 1.4826 * MAD estimates sigma for normal data.
Outcome mad_consistency() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<double> x(100000);
  for (auto& v : x) v = g(rng);
  const double med = saliency::median(x);
  for (auto& v : x) v = std::abs(v - med);
  const double est = 1.4826 * saliency::median(x);
  return {est >= 0.98 && est <= 1.02, fmt("1.4826 * MAD = %.5f (window [0.98, 1.02])", est)};
}

// 8. Psi(A cos(Omega n)) = A^2 sin^2(Omega).
Outcome teager_kaiser_identity() {
  double worst = 0.0;
  for (double omega : {0.1, 0.3, 1.0}) {
    for (double a : {0.5, 2.0}) {
      std::vector<double> x(256);
      for (std::size_t n = 0; n < x.size(); ++n) x[n] = a * std::cos(omega * static_cast<double>(n));
      const auto psi = dsp::teager_kaiser(std::span<const double>(x));
      const double expect = a * a * std::sin(omega) * std::sin(omega);
      for (std::size_t n = 1; n + 1 < x.size(); ++n) worst = std::max(worst, std::abs(psi[n] - expect) / expect);
    }
  }
  return {worst <= 0.01, fmt("max relative deviation %.3g (limit 1%%)", worst)};
}

// 9. Plasticity/stability equal the nested-loop definitions.
Outcome metric_oracle() {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> steps(2, 5), classes(2, 4);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto log = oracle::random_log(static_cast<std::size_t>(steps(rng)), classes(rng), rng);
    const auto ref = oracle::brute_metrics(log);
    const auto p = metrics::plasticity(log);
    const auto s = metrics::stability(log);
    const double got[] = {p.acc, p.mf1, s.aaa, s.aaf1};
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - ref[static_cast<std::size_t>(i)]));
  }
  auto graded = [](std::size_t n, std::size_t hits) {
    std::vector<LabelPair> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({i < hits ? 1 : 0, 1});
    return out;
  };
  PredictionLog worked;
  worked.steps = 3;
  worked.records = {{1, 1, graded(2, 2)}, {2, 2, graded(2, 2)}, {3, 3, graded(2, 2)},
                    {1, 2, graded(2, 2)}, {1, 3, graded(2, 1)}, {2, 3, graded(2, 1)}};
  const double aaa = metrics::stability(worked).aaa;
  return {worst <= 1e-9 && std::abs(aaa - 62.5) <= 1e-9,
          fmt("50 logs, max |diff| %.3g (limit 1e-9); worked T=3 AAA = %.4f", worst, aaa)};
}

CompressedSegment flat_payload(std::size_t scalars) {
  CompressedSegment cs;
  cs.length = scalars - 2;
  cs.channels = 1;
  cs.sample_rate = 100.0f;
  cs.rate = {1, 1};
  cs.low_rate_length = cs.length;
  cs.low_rate.assign(cs.length, 0.0f);
  cs.protected_indices = {0, static_cast<std::uint32_t>(cs.length - 1)};
  cs.verbatim = {0.0f, 0.0f};
  return cs;
}

// 10. Budgets, eviction optimality, gate boundary, replay mix.
Outcome buffer_properties() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, 3), cost_pick(4, 80);
  std::vector<std::string> failures;

  // Budget safety.
  BufferConfig cfg;
  cfg.budget_true = 500;
  cfg.budget_pseudo = 200;
  ReplayBuffer buf(cfg);
  bool safe = true;
  for (int i = 0; i < 10000; ++i) {
    BufferEntry e;
    e.payload = flat_payload(static_cast<std::size_t>(cost_pick(rng)));
    e.label = label(rng);
    e.feature = {u(rng), u(rng), u(rng)};
    if (i % 2 == 0) {
      buf.insert_true(std::move(e));
    } else {
      e.window_confidences.resize(20);
      for (auto& c : e.window_confidences) c = 0.85 + 0.15 * u(rng);
      buf.admit_pseudo(std::move(e));
    }
    safe = safe && buf.true_cost() <= cfg.budget_true && buf.pseudo_cost() <= cfg.budget_pseudo;
  }
  if (!safe) failures.push_back("budget exceeded");

  // Exhaustive kept set, up to 8 entries per class.
  int optimal = 0, trials = 0;
  std::uniform_int_distribution<int> classes(1, 2), members(1, 8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 40; ++t) {
    std::vector<BufferEntry> es;
    const int k = classes(rng);
    for (int c = 0; c < k; ++c) {
      const int m = members(rng);
      for (int i = 0; i < m; ++i) {
        BufferEntry e;
        e.payload = flat_payload(static_cast<std::size_t>(cost_pick(rng)));
        e.label = c;
        e.feature = {std::round(2 * g(rng)) / 2, std::round(2 * g(rng)) / 2};
        es.push_back(std::move(e));
      }
    }
    std::map<int, std::vector<const BufferEntry*>> by;
    for (const auto& e : es) by[e.label].push_back(&e);
    std::map<int, std::vector<double>> centre;
    for (const auto& [l, v] : by) centre[l] = compute_prototype(v)->mean;
    std::vector<oracle::KeepItem> items;
    std::size_t total = 0;
    for (std::size_t i = 0; i < es.size(); ++i) {
      items.push_back({euclidean_distance(es[i].feature, centre[es[i].label]), cost(es[i]), i});
      total += cost(es[i]);
    }
    BufferConfig small;
    small.budget_true = std::uniform_int_distribution<std::size_t>(0, total)(rng);
    const auto want = oracle::exhaustive_kept(items, small.budget_true);
    auto b = ReplayBuffer::restore(small, es);
    b.evict_true();
    std::vector<bool> got(es.size(), false);
    for (const auto& s : b.true_entries()) got[s.sequence] = true;
    ++trials;
    optimal += got == want ? 1 : 0;
  }
  if (optimal != trials) failures.push_back(fmt("eviction optimal on %d/%d", optimal, trials));

  // Gate boundary: strict on confidence, inclusive on count.
  auto gated = [](std::size_t windows, double conf) {
    BufferEntry e;
    e.window_confidences.assign(windows, conf);
    return confidence_gate(e, 0.9, 15).accepted;
  };
  const bool gate_ok = gated(15, 0.91) && !gated(14, 0.91) && !gated(20, 0.9) && gated(20, 0.95);
  if (!gate_ok) failures.push_back("gate boundary");

  // Replay mix and determinism.
  BufferConfig big;
  big.budget_true = big.budget_pseudo = 1000000;
  ReplayBuffer mix(big);
  for (int i = 0; i < 40; ++i) {
    BufferEntry e;
    e.payload = flat_payload(10);
    e.label = i % 4;
    e.feature = {double(i)};
    mix.insert_true(e);
    e.window_confidences.assign(20, 0.95);
    mix.admit_pseudo(e);
  }
  bool mix_ok = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = mix.sample_replay_batch(10, seed);
    const auto b2 = mix.sample_replay_batch(10, seed);
    std::size_t pseudo = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      pseudo += a[i].provenance == Provenance::pseudo_labeled;
      mix_ok = mix_ok && a[i].label == b2[i].label && a[i].segment == b2[i].segment;
    }
    mix_ok = mix_ok && a.size() == 10 && pseudo == 2;
  }
  if (!mix_ok) failures.push_back("replay mix");

  std::string detail = fmt("10^4 ops budget-safe: %s; eviction optimal %d/%d; gate boundary %s; 8:2 mix %s",
                           safe ? "yes" : "no", optimal, trials, gate_ok ? "ok" : "wrong", mix_ok ? "ok" : "wrong");
  return {failures.empty(), detail};
}

// 11. Parseable containers with inconsistent metadata still reconstruct.
Outcome fallback_totality() {
  std::mt19937_64 rng(11);
  const auto p = *find_preset("isruc");
  std::size_t ok = 0, fallback = 0;
  for (int k = 0; k < 100; ++k) {
    const auto fx = burst_fixture(p, 1500, 3, static_cast<std::uint64_t>(k), 0.4, 1.5);
    auto cs = codec::compress(fx.segment, 0.3, p.saliency).compressed;
    std::uniform_int_distribution<int> kind(0, 7);
    switch (kind(rng)) {
      case 0: cs.low_rate_length += 1 + rng() % 5; break;
      case 1: cs.low_rate_length -= 1 + rng() % 5; break;
      case 2: cs.length = 2 + rng() % 3000; break;
      case 3: cs.rate = {static_cast<std::uint32_t>(rng() % 4) * 2, 4}; break;
      case 4: cs.protected_indices.back() = static_cast<std::uint32_t>(cs.length + rng() % 100); break;
      case 5: std::swap(cs.protected_indices.front(), cs.protected_indices.back()); break;
      case 6: cs.verbatim[rng() % cs.verbatim.size()] = NAN; break;
      default: cs.low_rate[rng() % cs.low_rate.size()] = INFINITY; break;
    }
    cs.low_rate.resize(cs.low_rate_length * cs.channels, 0.25f);
    try {
      const auto decoded = container::deserialize(container::serialize(cs));
      const auto rec = codec::reconstruct(decoded);
      const auto& s = rec.segment;
      const bool finite = std::all_of(s.data().begin(), s.data().end(), [](float v) { return std::isfinite(v); });
      if (rec.used_fallback && finite && s.length() == decoded.length && s.channels() == decoded.channels) ++ok;
      fallback += rec.used_fallback ? 1 : 0;
    } catch (const std::exception&) {
      // Counted as a failure below.
    }
  }
  return {ok == 100, fmt("%zu/100 finite N x C reconstructions, %zu via interpolation", ok, fallback)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"storage accounting", storage_accounting},
      {"polyphase-naive equivalence", polyphase_equivalence},
      {"keyframe losslessness", keyframe_losslessness},
      {"band-limited fidelity", band_limited_fidelity},
      {"saliency detection", saliency_detection},
      {"rational approximation optimality", rational_optimality},
      {"MAD consistency", mad_consistency},
      {"Teager-Kaiser identity", teager_kaiser_identity},
      {"metric oracle", metric_oracle},
      {"buffer properties", buffer_properties},
      {"fallback totality", fallback_totality},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::printf("%s %2d %-34s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", index - failed, criteria.size());
  return failed;
}
