#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crossloss/commands.hpp"
#include "crossloss/data.hpp"
#include "crossloss/influence.hpp"
#include "crossloss/io.hpp"
#include "crossloss/oracle.hpp"
#include "crossloss/training.hpp"
#include "crossloss/weat.hpp"
#include "fixtures.hpp"
#include "instances.hpp"

using namespace crossloss;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

SolverConfig direct_solver(double damping) {
  SolverConfig s;
  s.kind = SolverKind::direct;
  s.lissa.damping = damping;
  return s;
}

struct SmallDec {
  std::vector<LabeledPoint> points;
  DecTraining dec;
  std::vector<Sample> dataset;
};

const SmallDec& small_dec() {
  static const SmallDec f = [] {
    SmallDec s;
    MogConfig m;
    m.per_class = 10;
    m.seed = 1;
    s.points = generate_mog(m);
    DecConfig cfg;
    cfg.seed = 7;
    s.dec = train_dec(s.points, 3, cfg);
    s.dataset.assign(s.points.begin(), s.points.end());
    return s;
  }();
  return f;
}

std::vector<double> scores_of(const std::vector<InfluenceRecord>& r) {
  std::vector<double> out;
  for (const auto& x : r) out.push_back(x.score);
  return out;
}

// ---------------------------------------------------------------------------

Outcome gradients_and_hvps() {
  double worst_grad = 0, worst_hvp = 0;
  std::string per_family;
  std::mt19937_64 rng(2024);
  for (const auto& fam : instances::families()) {
    double g = 0, h = 0;
    for (int draw = 0; draw < 100; ++draw) {
      auto in = fam.make(rng);
      g = std::max(g, grad_check(*in.obj, in.params, in.batch));
      const auto v = instances::random_direction(rng, in.params);
      const auto fd = fd_hvp(*in.obj, in.params, in.batch, v);
      h = std::max(h, (in.obj->hvp(in.params, in.batch, v) - fd).norm() / std::max(fd.norm(), 1e-8));
    }
    worst_grad = std::max(worst_grad, g);
    worst_hvp = std::max(worst_hvp, h);
    per_family += fmt::format(" {}={:.1e}/{:.1e}", fam.name, g, h);
  }
  return {worst_grad < 1e-4 && worst_hvp < 1e-3,
          fmt::format("worst grad err {:.2e} (< 1e-4), worst HVP err {:.2e} (< 1e-3); grad/hvp:{}", worst_grad,
                      worst_hvp, per_family)};
}

Outcome lissa_vs_direct() {
  const auto& f = small_dec();
  const DecObjective train(f.dec.run.target);
  const NllObjective nll(3, 2, f.dec.class_map);
  const auto params = f.dec.run.model.to_params();
  SolverConfig lissa;
  lissa.lissa.seed = 5;
  double worst_err = 0, worst_rho = 1;
  for (std::size_t t = 0; t < f.dataset.size(); ++t) {
    const std::span<const Sample> test(&f.dataset[t], 1);
    const auto a = stest(nll, test, train, params, f.dataset, lissa);
    const auto b = stest(nll, test, train, params, f.dataset, direct_solver(lissa.lissa.damping));
    worst_err = std::max(worst_err, (a - b).norm() / b.norm());
    const auto sa = scores_of(score_all(a, train, params, f.dataset));
    const auto sb = scores_of(score_all(b, train, params, f.dataset));
    worst_rho = std::min(worst_rho, spearman(sa, sb));
  }
  return {worst_err < 0.05 && worst_rho >= 0.95,
          fmt::format("{} params, 30 test points: worst rel L2 err {:.2f}% (< 5%), worst Spearman {:.4f} (>= 0.95)",
                      params.size(), 100 * worst_err, worst_rho)};
}

Outcome mog_reproduction() {
  MogConfig m;
  m.seed = 1;
  const auto points = generate_mog(m);
  DecConfig cfg;
  cfg.seed = 7;
  const auto audit = run_mog_audit(points, 3, cfg, direct_solver(0.01));
  const double matched = audit.matched.report.fraction_above.at(0.6);
  const double cross = audit.cross.report.fraction_above.at(0.6);
  std::string classes;
  for (const auto& [c, fr] : audit.cross.report.class_fraction_above)
    classes += fmt::format(" {}:{:.0f}%", c, 100 * fr.at(0.6));
  return {cross >= 0.70 && cross >= matched - 0.10,
          fmt::format("{} points, DEC acc {:.3f}; r > 0.6: cross {:.1f}% (>= 70%), matched {:.1f}%; cross per class{}; "
                      "cross r > 0.8: {:.1f}%",
                      points.size(), audit.dec.accuracy, 100 * cross, 100 * matched, classes,
                      100 * audit.cross.report.fraction_above.at(0.8))};
}

Outcome planted_pipeline() {
  const auto spec = fixtures::career_spec();
  const auto corpus = tokenize(plant_biased_corpus(fixtures::planted_config(spec, 1.0, 5000, 1)), {});
  TrainConfig tc;
  tc.dim = 16;
  tc.epochs = 6;
  tc.seed = 101;
  const auto run = train_skipgram(corpus, tc);
  const auto dataset = sentence_dataset(run);
  const double trained = std::abs(weat_effect(spec, EmbeddingView::input_of(run.model)).effect);

  MitigationConfig mc;
  mc.weat = spec;
  mc.k_amplifying = 50;
  mc.k_mitigating = 50;
  mc.steps = 200;
  mc.finetune_lr = 0.5;
  SolverConfig solver;
  solver.lissa.seed = 3;
  const auto down = mitigate(run.model, dataset, mc, solver);
  mc.mode = MitigationMode::overbias;
  const auto up = mitigate(run.model, dataset, mc, solver);
  const double reduction = 1 - std::abs(down.after.effect) / std::abs(down.before.effect);
  return {trained > 0.5 && reduction >= 0.5 && std::abs(up.after.effect) > std::abs(up.before.effect),
          fmt::format("vocab {}, {} sentences; trained |WEAT| {:.3f} (> 0.5); mitigate -> {:.3f} ({:.0f}% reduction, "
                      ">= 50%); overbias -> {:.3f} (> {:.3f})",
                      corpus.vocab.size(), corpus.documents.size(), trained, std::abs(down.after.effect),
                      100 * reduction, std::abs(up.after.effect), std::abs(up.before.effect))};
}

// Brute-force WEAT over explicit vectors, population standard deviation.
double brute_weat(const std::map<std::string, std::vector<double>>& e, const WeatSpec& s) {
  const auto cos = [](const std::vector<double>& u, const std::vector<double>& v) {
    double uv = 0, uu = 0, vv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      uv += u[i] * v[i];
      uu += u[i] * u[i];
      vv += v[i] * v[i];
    }
    return uv / std::sqrt(uu * vv);
  };
  const auto assoc = [&](const std::string& w) {
    double a = 0, b = 0;
    for (const auto& x : s.a) a += cos(e.at(w), e.at(x));
    for (const auto& x : s.b) b += cos(e.at(w), e.at(x));
    return a / static_cast<double>(s.a.size()) - b / static_cast<double>(s.b.size());
  };
  std::vector<double> sx, sy, all;
  for (const auto& w : s.x) sx.push_back(assoc(w));
  for (const auto& w : s.y) sy.push_back(assoc(w));
  all = sx;
  all.insert(all.end(), sy.begin(), sy.end());
  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const double mu = mean(all);
  double var = 0;
  for (double v : all) var += (v - mu) * (v - mu);
  return (mean(sx) - mean(sy)) / std::sqrt(var / static_cast<double>(all.size()));
}

Outcome weat_units() {
  std::map<std::string, std::vector<double>> e{
      {"x1", {1.0, 0.2, 0.1}},  {"x2", {0.8, -0.3, 0.4}}, {"y1", {-0.2, 1.0, 0.3}}, {"y2", {0.1, 0.7, -0.5}},
      {"a1", {0.9, 0.1, 0.0}},  {"a2", {0.6, 0.3, 0.2}},  {"b1", {0.0, 1.0, 0.1}},  {"b2", {-0.1, 0.5, 0.6}},
      {"s1", {1.0, 2.0, 0.5}},  {"s2", {1.0, -2.0, 0.5}}, {"s3", {-1.0, 2.0, 0.5}}, {"s4", {-1.0, -2.0, 0.5}},
      {"m1", {0.0, 1.0, 0.3}},  {"m2", {0.0, -1.0, 0.3}}, {"m3", {2.0, 1.0, 0.0}},  {"m4", {2.0, -1.0, 0.0}}};
  Vocabulary vocab;
  std::vector<double> table;
  for (const auto& [w, v] : e) {
    vocab.add(w);
    table.insert(table.end(), v.begin(), v.end());
  }
  const EmbeddingView view{vocab, 3, table};

  const WeatSpec hand{"hand", {"x1", "x2"}, {"y1", "y2"}, {"a1", "a2"}, {"b1", "b2"}};
  const double got = weat_effect(hand, view).effect;
  const double want = brute_weat(e, hand);
  const WeatSpec swapped{"swap", hand.y, hand.x, hand.a, hand.b};
  const double swap = weat_effect(swapped, view).effect;

  // Reflection y -> -y maps each set onto itself and A onto B: every association pairs with its negative.
  const WeatSpec mirror{"mirror", {"s1", "s2"}, {"s3", "s4"}, {"m1", "m3"}, {"m2", "m4"}};
  const double sym = weat_effect(mirror, view).effect;
  // Random instance of the same construction: X = {u, Ru}, Y = {v, Rv}, B = R(A), R flips the last axis.
  std::mt19937_64 rng(5);
  const auto reflect = [](std::vector<double> w) {
    w.back() = -w.back();
    return w;
  };
  std::map<std::string, std::vector<double>> r;
  for (const char* w : {"u", "v", "p", "q"}) r[w] = fixtures::uniform_vec(rng, 4, -1, 1);
  for (const char* w : {"u", "v", "p", "q"}) r[std::string(w) + "'"] = reflect(r[w]);
  Vocabulary rv;
  std::vector<double> rt;
  for (const auto& [w, v] : r) {
    rv.add(w);
    rt.insert(rt.end(), v.begin(), v.end());
  }
  const WeatSpec random_mirror{"random", {"u", "u'"}, {"v", "v'"}, {"p", "q"}, {"p'", "q'"}};
  const double random_effect = weat_effect(random_mirror, EmbeddingView{rv, 4, rt}).effect;

  const bool ok = std::abs(got - want) < 1e-12 && swap == -got && std::abs(sym) <= 1e-12 &&
                  std::abs(random_effect) <= 1e-12;
  return {ok, fmt::format("hand 2+2/2+2 effect {:.12f} vs brute force {:.12f}; swapped {:.12f}; symmetric {:.1e}, {:.1e}",
                          got, want, swap, sym, random_effect)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().filename().string()] = io::read_text(e.path());
  return out;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "crossloss_acceptance_determinism";
  const auto p = [&](const char* n) { return (dir / n).string(); };
  const auto pipeline = [&] {
    fs::remove_all(dir);
    fs::create_directories(dir);
    io::write_text(p("career.json"), io::weat_spec_json(fixtures::career_spec()).dump());
    std::ostringstream sink;
    using cli::json;
    cli::run("mog-gen", {{"seed", 1}, {"per_class", 10}, {"output", p("mog.csv")}}, sink);
    cli::run("train-dec", {{"seed", 7}, {"points", p("mog.csv")}, {"output", p("dec.json")}}, sink);
    cli::run("influence", {{"seed", 2}, {"train_loss", "dec"}, {"test_loss", "nll"}, {"model", p("dec.json")},
                           {"points", p("mog.csv")}, {"test_point", 3}, {"output", p("dec_influence.jsonl")}},
             sink);
    cli::run("loo-audit", {{"seed", 4}, {"per_class", 5}, {"solver", "lissa"}, {"output", p("audit.csv")}}, sink);
    cli::run("plant-corpus", {{"seed", 5}, {"size", 800}, {"weat_spec", p("career.json")}, {"output", p("corpus.txt")}},
             sink);
    cli::run("train-sg", {{"seed", 6}, {"corpus", p("corpus.txt")}, {"dim", 8}, {"epochs", 2}, {"output", p("sg")}},
             sink);
    cli::run("influence", {{"seed", 8}, {"train_loss", "sg"}, {"test_loss", "weat"}, {"model", p("sg")},
                           {"weat_spec", p("career.json")}, {"depth", 300}, {"output", p("sg_influence.jsonl")}},
             sink);
    cli::run("mitigate", {{"seed", 9}, {"model", p("sg")}, {"weat_spec", p("career.json")}, {"depth", 300},
                          {"steps", 10}, {"top", 20}, {"output", p("mitigated")}},
             sink);
    cli::run("overbias", {{"seed", 9}, {"model", p("sg")}, {"weat_spec", p("career.json")}, {"depth", 300},
                          {"steps", 10}, {"top", 20}, {"output", p("overbiased")}},
             sink);
    return snapshot(dir);
  };
  const auto first = pipeline();
  const auto second = pipeline();
  std::vector<std::string> differing;
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    if (it == second.end() || it->second != bytes) differing.push_back(name);
  }
  const bool ok = differing.empty() && first.size() == second.size();
  std::string detail = fmt::format("{} output files from train-dec, train-sg, influence (dec, sg), loo-audit, "
                                   "mitigate and overbias reran byte-identically",
                                   first.size());
  if (!ok) detail = fmt::format("{} of {} files differ, e.g. {}", differing.size(), first.size(),
                                differing.empty() ? "(file set)" : differing.front());
  fs::remove_all(dir);
  return {ok, detail};
}

Outcome matched_specialization() {
  const auto& f = small_dec();
  const DecObjective obj(f.dec.run.target);
  const auto params = f.dec.run.model.to_params();
  const auto n = static_cast<Eigen::Index>(params.size());

  // Independent path: Hessian by central differences of the gradient, per-sample
  // gradients by central differences of the loss, dense QR solve.
  Eigen::MatrixXd h(n, n);
  const double step = 1e-5;
  for (Eigen::Index j = 0; j < n; ++j) {
    ParamVector plus = params, minus = params;
    plus[static_cast<std::size_t>(j)] += step;
    minus[static_cast<std::size_t>(j)] -= step;
    const auto gp = obj.grad(plus, f.dataset), gm = obj.grad(minus, f.dataset);
    for (Eigen::Index i = 0; i < n; ++i)
      h(i, j) = (gp[static_cast<std::size_t>(i)] - gm[static_cast<std::size_t>(i)]) / (2 * step);
  }
  h = 0.5 * (h + h.transpose()).eval();
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h);
  Eigen::MatrixXd g(n, static_cast<Eigen::Index>(f.dataset.size()));
  for (std::size_t z = 0; z < f.dataset.size(); ++z) {
    const auto gz = fd_grad(obj, params, std::span<const Sample>(&f.dataset[z], 1));
    for (Eigen::Index i = 0; i < n; ++i) g(i, static_cast<Eigen::Index>(z)) = gz[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd hinv_g = qr.solve(g);

  double worst = 0;
  for (std::size_t t = 0; t < f.dataset.size(); ++t) {
    const std::span<const Sample> test(&f.dataset[t], 1);
    const auto s = stest(obj, test, obj, params, f.dataset, direct_solver(0.0));
    const auto pipeline = scores_of(score_all(s, obj, params, f.dataset));
    // Classical influence of upweighting z on the loss at t: -grad_t^T H^-1 grad_z.
    const Eigen::VectorXd reference = -(g.col(static_cast<Eigen::Index>(t)).transpose() * hinv_g).transpose();
    const Eigen::Map<const Eigen::VectorXd> got(pipeline.data(), static_cast<Eigen::Index>(pipeline.size()));
    worst = std::max(worst, (got - reference).norm() / reference.norm());
  }
  return {worst < 1e-6, fmt::format("{} params, 30 test points, undamped: worst rel L2 err {:.2e} (< 1e-6)", n, worst)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient/HVP suite", gradients_and_hvps},
      {"iHVP oracle equivalence", lissa_vs_direct},
      {"MOG cross-loss LOO reproduction", mog_reproduction},
      {"planted-bias WEAT pipeline", planted_pipeline},
      {"WEAT unit correctness", weat_units},
      {"determinism", determinism},
      {"matched-loss specialization", matched_specialization},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::cout << fmt::format("{} criterion {}: {} | {} [{:.1f}s]", o.pass ? "PASS" : "FAIL", i + 1,
                             criteria[i].first, o.detail, secs)
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
