#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "wic/diffnum.hpp"
#include "wic/errors.hpp"

using namespace wic;

namespace {

Vector random_vector(int n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

// Hand-unrolled 2-layer ReLU MLP plus affine head, matching the documented
// parameter layout, used as an arithmetic oracle.
double hand_mlp(const std::vector<double>& p, double x) {
  // hidden = 2, input = 1, output = 1
  const double w1[2] = {p[0], p[1]};
  const double b1[2] = {p[2], p[3]};
  const double w2[2][2] = {{p[4], p[5]}, {p[6], p[7]}};
  const double b2[2] = {p[8], p[9]};
  const double w3[2] = {p[10], p[11]};
  const double b3 = p[12];
  double h1[2];
  for (int i = 0; i < 2; ++i) h1[i] = std::max(0.0, w1[i] * x + b1[i]);
  double h2[2];
  for (int i = 0; i < 2; ++i) h2[i] = std::max(0.0, w2[i][0] * h1[0] + w2[i][1] * h1[1] + b2[i]);
  return w3[0] * h2[0] + w3[1] * h2[1] + b3;
}

}  // namespace

TEST_CASE("parameter counts follow the topology arithmetic") {
  CHECK(ParamFunction::param_count_for(Topology::linear(), 225, 20) == 225 * 20 + 20);
  CHECK(ParamFunction::param_count_for(Topology::mlp(128), 4, 4) ==
        128 * 4 + 128 + 128 * 128 + 128 + 4 * 128 + 4);
  CHECK(ParamFunction(Topology::mlp(3), 2, 5).param_count() ==
        ParamFunction::param_count_for(Topology::mlp(3), 2, 5));
}

TEST_CASE("linear forward") {
  ParamFunction f(Topology::linear(), 3, 3);
  Vector x(3);
  x << 0.5, -2.0, 7.0;
  CHECK(f.forward(x).isZero(0.0));
  // W = identity, b = 0 (row-major W then b)
  for (int i = 0; i < 3; ++i) f.params()[i * 3 + i] = 1.0;
  CHECK(f.forward(x) == x);
  CHECK_THROWS_AS(f.forward(Vector::Zero(2)), ContractViolation);
}

TEST_CASE("mlp forward against hand arithmetic") {
  ParamFunction f(Topology::mlp(2), 1, 1);
  const std::vector<double> p = {1.0, -2.0, 0.5, 0.25, 1.5, -1.0, 0.5, 2.0, -0.1, 0.3, 2.0, -3.0, 0.7};
  REQUIRE(f.param_count() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) f.params()[i] = p[i];
  for (double x : {1.0, -1.0, 0.0, 0.3, 2.5}) {
    Vector in(1);
    in << x;
    CHECK(f.forward(in)[0] == doctest::Approx(hand_mlp(p, x)).epsilon(1e-14));
  }
  // x = 1: h1 = (1.5, 0), h2 = relu(2.25 - 0.1, 0.75 + 0.3) = (2.15, 1.05)
  // y = 2*2.15 - 3*1.05 + 0.7 = 1.85
  Vector one(1);
  one << 1.0;
  CHECK(f.forward(one)[0] == doctest::Approx(1.85).epsilon(1e-14));
}

TEST_CASE("forward_batch matches column-wise forward") {
  Rng rng(1);
  for (Topology t : {Topology::linear(), Topology::mlp(16)}) {
    ParamFunction f(t, 5, 3);
    f.init_glorot(rng);
    const Matrix xs = Matrix::Random(5, 7);
    const Matrix ys = f.forward_batch(xs);
    for (int j = 0; j < 7; ++j) CHECK((ys.col(j) - f.forward(xs.col(j))).norm() <= 1e-12);
  }
}

TEST_CASE("linear backward is the bilinear form") {
  ParamFunction f(Topology::linear(), 3, 2);
  Vector x(3);
  x << 2.0, -1.0, 0.5;
  Vector up = Vector::Zero(2);
  up[0] = 1.0;
  const Vector g = f.backward(x, up);
  Vector expect = Vector::Zero(8);
  expect.head(3) = x;
  expect[6] = 1.0;
  CHECK(g == expect);
  CHECK(f.backward(x, Vector::Zero(2)).isZero(0.0));
}

TEST_CASE("backward matches central differences on 100 probes per topology") {
  Rng rng(2);
  struct Case {
    Topology topo;
    int in;
    int out;
  };
  for (const Case c : {Case{Topology::linear(), 6, 4}, Case{Topology::mlp(128), 4, 4}}) {
    ParamFunction f(c.topo, c.in, c.out);
    const int n = static_cast<int>(f.param_count());
    double worst = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
      f.init_glorot(rng);
      f.params() += random_vector(n, rng, 0.1);
      const Vector x = random_vector(c.in, rng);
      const Vector up = random_vector(c.out, rng);
      const Vector analytic = f.backward(x, up);
      // Probe a random subset of coordinates for the large network.
      std::vector<int> coords;
      if (n > 256) {
        for (int k = 0; k < 64; ++k) coords.push_back(static_cast<int>(uniform_below(rng, n)));
        std::sort(coords.begin(), coords.end());
        coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
      }
      ParamFunction probe_fn = f;
      const auto objective = [&](const Vector& p) {
        probe_fn.params() = p;
        return up.dot(probe_fn.forward(x));
      };
      const Vector numeric = central_difference(objective, f.params(), 1e-5, coords);
      Vector restricted = analytic;
      if (!coords.empty()) {
        restricted.setZero();
        for (int k : coords) restricted[k] = analytic[k];
      }
      worst = std::max(worst, relative_error(restricted, numeric));
    }
    INFO(to_string(c.topo));
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("accumulate_gradient equals summed backward") {
  Rng rng(3);
  ParamFunction f(Topology::mlp(8), 3, 2);
  f.init_glorot(rng);
  const Matrix xs = Matrix::Random(3, 5);
  const Matrix ups = Matrix::Random(2, 5);
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(f.param_count()));
  f.accumulate_gradient(xs, ups, acc);
  Vector sum = Vector::Zero(acc.size());
  for (int j = 0; j < 5; ++j) sum += f.backward(xs.col(j), ups.col(j));
  CHECK((acc - sum).norm() <= 1e-12);
}

TEST_CASE("mlp is piecewise linear within an activation pattern") {
  Rng rng(4);
  ParamFunction f(Topology::mlp(16), 3, 2);
  f.init_glorot(rng);
  for (int probe = 0; probe < 50; ++probe) {
    const Vector x = random_vector(3, rng);
    const Vector d = random_vector(3, rng, 1e-7);
    // A tiny step keeps the activation pattern with overwhelming probability:
    // f(x + 2d) - f(x + d) == f(x + d) - f(x).
    const Vector a = f.forward(x);
    const Vector b = f.forward(x + d);
    const Vector c = f.forward(x + 2 * d);
    CHECK(((c - b) - (b - a)).norm() <= 1e-12);
  }
}

TEST_CASE("glorot initialization bounds") {
  Rng rng(5);
  ParamFunction f(Topology::linear(), 10, 6);
  f.init_glorot(rng);
  const double a = std::sqrt(6.0 / 16.0);
  for (int i = 0; i < 60; ++i) CHECK(std::abs(f.params()[i]) <= a);
  for (int i = 60; i < 66; ++i) CHECK(f.params()[i] == 0.0);
}

TEST_CASE("sgd update") {
  Optimizer opt = Optimizer::sgd(0.003);
  Vector p(1);
  p << 1.0;
  Vector g(1);
  g << 1.0;
  opt.apply(p, g);
  CHECK(p[0] == doctest::Approx(0.997).epsilon(1e-15));
  const Vector before = p;
  opt.apply(p, Vector::Zero(1));
  CHECK(p == before);
  CHECK_THROWS_AS(Optimizer::sgd(0.0), ConfigError);
}

TEST_CASE("adam update") {
  Optimizer opt = Optimizer::adam(0.001);
  Vector p(2);
  p << 1.0, -2.0;
  Vector g(2);
  g << 1.0, -4.0;
  opt.apply(p, g);
  // Bias-corrected first step: m_hat = g, v_hat = g^2, step = lr * g / (|g| + eps).
  CHECK(p[0] == doctest::Approx(1.0 - 0.001 / (1.0 + 1e-8)).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(-2.0 + 0.001 * 4.0 / (4.0 + 1e-8)).epsilon(1e-14));
  CHECK(opt.step_count() == 1);

  Optimizer fresh = Optimizer::adam(0.001);
  Vector q(1);
  q << 3.0;
  fresh.apply(q, Vector::Zero(1));
  CHECK(q[0] == 3.0);
  CHECK(fresh.step_count() == 1);

  // Second step against a closed-form recurrence.
  Optimizer two = Optimizer::adam(0.01);
  Vector r(1);
  r << 0.0;
  Vector g1(1);
  g1 << 2.0;
  Vector g2(1);
  g2 << -1.0;
  two.apply(r, g1);
  two.apply(r, g2);
  const double m1 = 0.1 * 2.0, v1 = 0.001 * 4.0;
  const double m2 = 0.9 * m1 + 0.1 * -1.0, v2 = 0.999 * v1 + 0.001 * 1.0;
  const double step1 = 0.01 * (m1 / 0.1) / (std::sqrt(v1 / 0.001) + 1e-8);
  const double step2 = 0.01 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
  CHECK(r[0] == doctest::Approx(-step1 - step2).epsilon(1e-12));
}

TEST_CASE("optimizer updates are deterministic") {
  Rng rng(6);
  const Vector g = random_vector(20, rng);
  Vector a = random_vector(20, rng);
  Vector b = a;
  Optimizer oa = Optimizer::adam(0.01);
  Optimizer ob = Optimizer::adam(0.01);
  for (int i = 0; i < 10; ++i) {
    oa.apply(a, g);
    ob.apply(b, g);
  }
  CHECK(a == b);
  CHECK(oa.first_moment().size() == 20);
}

TEST_CASE("checkpoint round trip") {
  Rng rng(7);
  for (Topology t : {Topology::linear(), Topology::mlp(12)}) {
    ParamFunction f(t, 7, 3);
    f.init_glorot(rng);
    const std::string bytes = serialize_checkpoint(f, {4, 5});
    const Checkpoint back = deserialize_checkpoint(bytes);
    CHECK(back.function == f);
    CHECK(back.extra == CheckpointExtra{4, 5});
    CHECK(serialize_checkpoint(back.function, back.extra) == bytes);
  }
  ParamFunction f(Topology::linear(), 2, 2);
  std::string bytes = serialize_checkpoint(f);
  CHECK_THROWS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 1)));
  bytes[0] = 'X';
  CHECK_THROWS(deserialize_checkpoint(bytes));
}

TEST_CASE("relative error definition") {
  Vector a(2);
  a << 1.0, 0.0;
  Vector b(2);
  b << 1.0, 1e-6;
  CHECK(relative_error(a, b) == doctest::Approx(1e-6).epsilon(1e-6));
  CHECK(relative_error(Vector::Zero(3), Vector::Zero(3)) == 0.0);
}
