#include "doctest.h"
#include "support.hpp"

#include "sweep/errors.hpp"
#include "sweep/fitter.hpp"
#include "sweep/fixtures.hpp"
#include "sweep/log.hpp"

#include <cmath>

using namespace sweep;
using doctest::Approx;

namespace {

Assembly single(const SweepPrimitive& p, double gate = 1.0) {
  Assembly a;
  a.primitives = {p};
  a.gates = {gate};
  return a;
}

SweepPrimitive far_primitive() {
  // Thin, nowhere near the test points used below.
  return test::straight_primitive(Vec3(0.45, 0.45, -0.1), Vec3(0.45, 0.45, 0.1), 0.01, 0.01, 2.0);
}

}  // namespace

TEST_CASE("reconstruction loss") {
  TestPointSet tps;
  for (int i = 0; i < 10; ++i) {
    tps.points.push_back(Vec3(-0.3 + 0.05 * i, 0, 0));
    tps.labels.push_back(i % 2);
  }
  const FitConfig cfg = FitConfig::defaults(1);
  CHECK(loss_recon(single(far_primitive()), tps, cfg) == Approx(0.5).epsilon(1e-9));

  // Labels reproduced exactly from hard occupancies.
  const std::vector<double> gates = {1.0, 1.0};
  const std::vector<double> occ = {1, 0, 0, 0, 1, 1, 0, 1};
  const std::vector<double> labels = {1, 0, 1, 1};
  CHECK(recon_from(gates, occ, labels, 1e6) == Approx(0.0).epsilon(1e-12));

  // Two-loop reference on 100 points.
  Rng rng(3);
  const std::size_t n = 100;
  const std::vector<double> g3 = {0.9, 0.2, 0.6};
  std::vector<double> o3(n * 3), l3(n);
  for (auto& v : o3) v = rng.uniform();
  for (auto& v : l3) v = rng.uniform() < 0.5 ? 1 : 0;
  double ref = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double num = 0.0, den = 0.0;
    double top = -1e300;
    for (int i = 0; i < 3; ++i) top = std::max(top, 40.0 * g3[i] * o3[p * 3 + i]);
    for (int i = 0; i < 3; ++i) {
      const double v = g3[i] * o3[p * 3 + i];
      const double w = std::exp(40.0 * v - top);
      num += v * w;
      den += w;
    }
    const double e = num / den - l3[p];
    ref += e * e;
  }
  ref /= static_cast<double>(n);
  CHECK(std::abs(recon_from(g3, o3, l3, 40.0) - ref) < 1e-12);
}

TEST_CASE("overlap loss") {
  FitConfig cfg = FitConfig::defaults(2);
  const std::vector<double> gates = {1.0, 1.0};
  const std::vector<double> zeros(6, 0.0);
  CHECK(overlap_from(gates, zeros, 3, cfg) == 0.0);
  const std::vector<double> both = {1.0, 1.0};
  CHECK(overlap_from(gates, both, 1, cfg) == Approx(0.8).epsilon(1e-15));
  cfg.overlap_mode = OverlapMode::paper_literal;
  cfg.beta = 6.4;
  CHECK(overlap_from(gates, both, 1, cfg) == Approx(-4.4).epsilon(1e-15));
  CHECK(parse_overlap_mode("paper") == OverlapMode::paper_literal);
  CHECK(parse_overlap_mode("paper_literal") == OverlapMode::paper_literal);
  CHECK(parse_overlap_mode("hinge") == OverlapMode::hinge);
  CHECK_THROWS_AS(parse_overlap_mode("max"), DomainError);

  // Averaged over points, gated.
  cfg = FitConfig::defaults(2);
  const std::vector<double> occ = {1.0, 1.0, 0.5, 0.5};
  const std::vector<double> half = {1.0, 0.5};
  const double s0 = 1.0 + 0.5, s1 = 0.5 + 0.25;
  CHECK(overlap_from(half, occ, 2, cfg) == Approx((std::max(s0 - 1.2, 0.0) + std::max(s1 - 1.2, 0.0)) / 2).epsilon(1e-15));
}

TEST_CASE("parsimony loss") {
  Assembly a;
  const SweepPrimitive p = far_primitive();
  a.primitives.assign(8, p);
  a.gates = {1, 1, 1, 1, 0, 0, 0, 0};
  CHECK(loss_parsimony(a) == 2.0);
  a.gates = {1, 0, 0, 0, 0, 0, 0, 0};
  CHECK(loss_parsimony(a) == 1.0);
  a.primitives.assign(3, p);
  a.gates = {1, 1, 0.25};
  CHECK(loss_parsimony(a) == 1.5);
}

TEST_CASE("axis loss") {
  const SweepPrimitive line = test::straight_primitive(Vec3(-0.2, 0, 0.1), Vec3(0.2, 0, 0.1), 0.05, 0.05, 2.0);
  SkeletonPoints m;
  for (int i = 0; i < 64; i += 3) m.points.push_back(axis_point(line.axis, i / 63.0));
  CHECK(loss_axis(single(line), m, 64) == Approx(0.0).epsilon(1e-15));
  SkeletonPoints origin;
  origin.points = {Vec3(0, 0, 0)};
  CHECK(loss_axis(single(line), origin, 65) == Approx(0.1).epsilon(1e-12));

  // Brute-force double loop with |M| = 200 and |S| = 300.
  Rng rng(12);
  Assembly a;
  for (int i = 0; i < 3; ++i) a.primitives.push_back(test::random_primitive(rng));
  a.gates = {0.9, 0.6, 0.01};
  SkeletonPoints big;
  for (int i = 0; i < 200; ++i) big.points.push_back(Vec3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)));
  double ref = 0.0;
  for (const Vec3& q : big.points) {
    double best = 1e300;
    for (int i = 0; i < 2; ++i)
      for (int s = 0; s < 150; ++s) best = std::min(best, (q - axis_point(a.primitives[i].axis, s / 149.0)).norm());
    ref += best;
  }
  ref /= 200.0;
  CHECK(std::abs(loss_axis(a, big, 150) - ref) < 1e-12);

  // Fallback to every primitive when no gate passes.
  a.gates = {0.01, 0.02, 0.03};
  std::vector<std::string> warnings;
  const auto previous = set_warning_sink([&](const std::string& w) { warnings.push_back(w); });
  const double fallback = loss_axis(a, big, 150);
  set_warning_sink(previous);
  CHECK(warnings.size() == 1);
  CHECK(fallback > 0.0);
  CHECK_THROWS_AS(loss_axis(a, SkeletonPoints{}, 64), DomainError);
}

TEST_CASE("weighted total") {
  const FitConfig cfg = FitConfig::defaults(8);
  CHECK(cfg.lambda1 == 12.0);
  CHECK(cfg.lambda2 == 6.0);
  CHECK(cfg.lambda3 == 0.3);
  CHECK(cfg.lambda4 == 5.0);
  CHECK(cfg.beta == Approx(6.4));
  CHECK(combine_losses(0.1, 0.0, 2.0, 0.05, cfg).total == Approx(2.05).epsilon(1e-15));
  CHECK(combine_losses(0, 0, 0, 0, cfg).total == 0.0);
  FitConfig doubled = cfg;
  doubled.lambda1 *= 2;
  CHECK(combine_losses(0.3, 0, 0, 0, doubled).total == Approx(2 * combine_losses(0.3, 0, 0, 0, cfg).total).epsilon(1e-15));
  CHECK(combine_losses(0, 0, 0, 1.0, cfg, 1000).lambda4 == Approx(5.0 * std::pow(0.999, 1000)).epsilon(1e-12));
  CHECK(FitConfig::defaults(1).lambda3 == Approx(0.0375));
  FitConfig bad = cfg;
  bad.lambda2 = -1;
  CHECK_THROWS_AS(check_config(bad), DomainError);
}

TEST_CASE("loss invariants on a fixture") {
  const VoxelGrid g = fixtures::make("l_tube", 32);
  FitConfig cfg = FitConfig::defaults(3);
  cfg.test_cells = 1024;
  cfg.surface_points = 256;
  const TestPointSet tps = make_test_points(g, cfg, 1);
  CHECK(tps.points.size() == 1024 + 256);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < tps.points.size(); ++i) {
    CHECK(tps.labels[i] == (g.contains(tps.points[i]) ? 1.0 : 0.0));
    inside += tps.labels[i] > 0.5;
  }
  CHECK(inside > 0);
  CHECK(inside < tps.points.size());
  const auto sk = extract_medial_axis(g);
  Assembly a = initialize_primitives(sk, 3, 0);
  const LossBreakdown l = loss_total(a, tps, sk, cfg);
  CHECK(l.recon >= 0.0);
  CHECK(l.recon <= 1.0);
  CHECK(l.overlap >= 0.0);
  CHECK(l.axis >= 0.0);
  CHECK(l.total == Approx(combine_losses(l.recon, l.overlap, l.parsimony, l.axis, cfg).total).epsilon(1e-14));

  // Singleton with gate 1: the assembled field is the primitive's field.
  const Assembly one = single(a.primitives[0]);
  const auto occ = primitive_occupancies(one, tps.points, cfg.field);
  const auto field = assembled_field(one, occ, tps.points.size(), cfg.alpha);
  for (std::size_t i = 0; i < field.size(); ++i) CHECK(field[i] == occ[i]);

  // Gate monotonicity.
  a.gates = {1.0, 0.0, 1.0};
  const double pars0 = loss_parsimony(a), axis0 = loss_axis(a, sk, 64);
  a.gates[1] = 1.0;
  CHECK(loss_parsimony(a) >= pars0);
  CHECK(loss_axis(a, sk, 64) <= axis0);
}

TEST_CASE("loss gradient against finite differences") {
  const VoxelGrid g = fixtures::make("l_tube", 32);
  for (bool straight : {false, true}) {
    FitConfig cfg = FitConfig::defaults(2);
    cfg.test_cells = 1024;
    cfg.surface_points = 256;
    cfg.straight_axis = straight;
    const auto tps = make_test_points(g, cfg, 1);
    const auto sk = extract_medial_axis(g);
    auto flat = encode_assembly(initialize_primitives(sk, 2, 0));
    Rng rng(5);
    for (auto& z : flat) z += rng.uniform(-0.3, 0.3);
    std::vector<double> grad(flat.size()), scratch(flat.size());
    const auto at = loss_and_gradient(flat, tps, sk, cfg, 10, grad);
    Assembly decoded = decode_assembly(flat, 2, 3, 2);
    if (straight) {
      for (auto& p : decoded.primitives) straighten_axis(p);
    }
    CHECK(at.total == Approx(loss_total(decoded, tps, sk, cfg, 10).total).epsilon(1e-12));
    for (int dir = 0; dir < 5; ++dir) {
      std::vector<double> u(flat.size());
      double norm = 0.0;
      for (auto& x : u) norm += (x = rng.uniform(-1, 1)) * x;
      double analytic = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) analytic += grad[i] * (u[i] /= std::sqrt(norm));
      const double h = 1e-5;
      auto p = flat, m = flat;
      for (std::size_t i = 0; i < u.size(); ++i) {
        p[i] += h * u[i];
        m[i] -= h * u[i];
      }
      const double fd = (loss_and_gradient(p, tps, sk, cfg, 10, scratch).total - loss_and_gradient(m, tps, sk, cfg, 10, scratch).total) / (2 * h);
      CHECK(analytic == Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("gate selection") {
  Assembly a;
  a.primitives.assign(3, far_primitive());
  a.gates = {0.9, 0.1, 0.6};
  const Assembly kept = select_primitives(a);
  CHECK(kept.K() == 2);
  CHECK(kept.gates == std::vector<double>{1.0, 1.0});
  CHECK(loss_parsimony(kept) == std::sqrt(2.0));
  a.gates = {0.2, 0.2, 0.2};
  CHECK(select_primitives(a).K() == 1);
  a.gates = {0.2, 0.3, 0.1};
  CHECK(pack_params(select_primitives(a).primitives[0]) == pack_params(a.primitives[1]));
}

TEST_CASE("assembly encoding") {
  Rng rng(6);
  Assembly a;
  for (int i = 0; i < 3; ++i) a.primitives.push_back(test::random_primitive(rng));
  a.gates = {0.3, 0.7, 0.5};
  const auto flat = encode_assembly(a);
  CHECK(flat.size() == 3 * 14 + 3);
  const Assembly b = decode_assembly(flat, 3, 3, 2);
  for (int i = 0; i < 3; ++i) {
    CHECK(b.gates[i] == Approx(a.gates[i]).epsilon(1e-12));
    const auto x = pack_params(a.primitives[i]), y = pack_params(b.primitives[i]);
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(y[j] == Approx(x[j]).epsilon(1e-9));
  }
  SweepPrimitive bent = a.primitives[0];
  straighten_axis(bent);
  const auto& c = bent.axis.control_points();
  CHECK((c[1] - 0.5 * (c[0] + c[2])).norm() < 1e-15);
}

TEST_CASE("short fit") {
  const VoxelGrid g = fixtures::make("cylinder", 32);
  FitConfig cfg = FitConfig::defaults(1);
  cfg.iterations = 40;
  cfg.test_cells = 2048;
  cfg.surface_points = 512;
  const FitResult r = fit(g, cfg);
  REQUIRE(r.trace.size() == 40);
  for (const auto& t : r.trace) CHECK(std::isfinite(t.total));
  CHECK(r.trace.back().total < r.trace.front().total);
  CHECK(r.assembly.selected_count() >= 1);
  for (double gate : r.assembly.gates) CHECK((gate == 0.0 || gate == 1.0));

  const FitResult again = fit(g, cfg);
  CHECK(pack_params(again.assembly.primitives[0]) == pack_params(r.assembly.primitives[0]));
  CHECK(again.soft_gates == r.soft_gates);

  FitConfig threaded = cfg;
  threaded.threads = 3;
  const FitResult t3 = fit(g, threaded);
  CHECK(pack_params(t3.assembly.primitives[0]) == pack_params(r.assembly.primitives[0]));
  CHECK(t3.trace.back().total == r.trace.back().total);
}

TEST_CASE("fit preconditions and divergence") {
  FitConfig cfg = FitConfig::defaults(1);
  cfg.iterations = 2;
  CHECK_THROWS_AS(fit(VoxelGrid(16), cfg), DomainError);
  CHECK_THROWS_AS(fit(fixtures::make("sphere", 4), cfg), DomainError);
  cfg.lambda1 = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(fit(fixtures::make("sphere", 16), cfg), doctest::Contains("recon"), DivergenceError);
}
