#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "marsec/nn/adam.hpp"
#include "marsec/nn/checkpoint.hpp"
#include "marsec/nn/gradcheck.hpp"
#include "marsec/nn/layers.hpp"
#include "marsec/nn/lstm.hpp"
#include "marsec/nn/tape.hpp"

using namespace marsec::nn;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

template <class URBG>
void fill_normal(ParamTensor& p, URBG& rng, double scale = 1.0) {
  p.value = scale * standard_normal(p.value.rows(), p.value.cols(), rng);
}

double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST(Dense, MatchesWorkedExample) {
  std::mt19937_64 rng(1);
  Dense d("d", 2, 2, rng);
  d.weight.value = mat({{1, 2}, {3, 4}});
  d.bias.value = mat({{0, 1}});
  const Matrix x = mat({{1, 1}});
  const Matrix y = d.predict(x);
  EXPECT_DOUBLE_EQ(y(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(y(0, 1), 8.0);

  Tape t;
  const Var out = d.forward(t, t.constant(x));
  EXPECT_DOUBLE_EQ(out.value()(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(out.value()(0, 1), 8.0);
}

TEST(Mlp, TapeAndPredictAgree) {
  std::mt19937_64 rng(7);
  Mlp net("m", 5, {16, 16}, 3, rng, Activation::relu, Activation::tanh);
  const Matrix x = standard_normal(9, 5, rng);
  Tape t;
  const Matrix a = net.forward(t, t.constant(x)).value();
  const Matrix b = net.predict(x);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(b.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Lstm, ZeroParametersGiveHalfGatesAndZeroCandidate) {
  LstmCellParams p("lstm", 3, 4);
  Tape t;
  const Var x = t.constant(mat({{0.3, -1.0, 2.0}}));
  const Var h0 = t.constant(Matrix::Zero(1, 4));
  const Var c0 = t.constant(Matrix::Constant(1, 4, 1.0));
  const LstmState s = lstm_cell(t, x, h0, c0, p);
  // f = 0.5, i = 0.5, cand = 0 -> c = 0.5; h = 0.5 * tanh(0.5)
  for (Eigen::Index j = 0; j < 4; ++j) {
    EXPECT_DOUBLE_EQ(s.c.value()(0, j), 0.5);
    EXPECT_NEAR(s.h.value()(0, j), 0.5 * std::tanh(0.5), 1e-15);
  }
}

TEST(Lstm, MatchesScalarReference) {
  std::mt19937_64 rng(11);
  LstmCellParams p("lstm", 2, 3, rng);
  const Matrix x = standard_normal(1, 2, rng);
  const Matrix h0 = standard_normal(1, 3, rng);
  const Matrix c0 = standard_normal(1, 3, rng);
  Tape t;
  const LstmState s = lstm_cell(t, t.constant(x), t.constant(h0), t.constant(c0), p);

  Matrix hx(1, 5);
  hx << h0, x;
  auto gate = [&](const ParamTensor& w, const ParamTensor& b, int j) {
    double z = b.value(0, j);
    for (int k = 0; k < 5; ++k) z += w.value(j, k) * hx(0, k);
    return z;
  };
  for (int j = 0; j < 3; ++j) {
    const double f = sigmoid_ref(gate(p.w_f, p.b_f, j));
    const double i = sigmoid_ref(gate(p.w_i, p.b_i, j));
    const double g = std::tanh(gate(p.w_c, p.b_c, j));
    const double o = sigmoid_ref(gate(p.w_o, p.b_o, j));
    const double c = f * c0(0, j) + i * g;
    EXPECT_NEAR(s.c.value()(0, j), c, 1e-12);
    EXPECT_NEAR(s.h.value()(0, j), o * std::tanh(c), 1e-12);
  }
}

TEST(Lstm, RejectsShapeMismatch) {
  LstmCellParams p("lstm", 3, 4);
  Tape t;
  EXPECT_THROW(lstm_cell(t, t.constant(Matrix::Zero(1, 2)), t.constant(Matrix::Zero(1, 4)),
                         t.constant(Matrix::Zero(1, 4)), p),
               std::invalid_argument);
}

TEST(Gaussian, LogProbAtOriginWithUnitStd) {
  Tape t;
  const Var mean = t.constant(Matrix::Zero(1, 2));
  const Var log_std = t.constant(Matrix::Zero(1, 2));
  const GaussianSample s = gaussian_reparam(mean, log_std, Matrix::Zero(1, 2));
  EXPECT_NEAR(s.log_prob.scalar(), -std::log(2.0 * M_PI), 1e-12);
  EXPECT_NEAR(s.log_prob.scalar(), -1.8379, 1e-4);
}

TEST(Gaussian, OneDimensionalExample) {
  Tape t;
  const GaussianSample s =
      gaussian_reparam(t.constant(Matrix::Zero(1, 1)), t.constant(Matrix::Zero(1, 1)), Matrix::Constant(1, 1, 1.0));
  EXPECT_DOUBLE_EQ(s.sample.scalar(), 1.0);
  EXPECT_NEAR(s.log_prob.scalar(), -1.4189385332, 1e-9);
}

TEST(Gaussian, TanhSquashMatchesDirectFormula) {
  std::mt19937_64 rng(3);
  const Matrix noise = standard_normal(4, 3, rng);
  const Matrix mu = standard_normal(4, 3, rng);
  const Matrix ls = 0.3 * standard_normal(4, 3, rng);
  Tape t;
  const GaussianSample sq = tanh_squash(gaussian_reparam(t.constant(mu), t.constant(ls), noise));
  for (int r = 0; r < 4; ++r) {
    double lp = 0;
    for (int c = 0; c < 3; ++c) {
      const double u = mu(r, c) + std::exp(ls(r, c)) * noise(r, c);
      lp += -0.5 * noise(r, c) * noise(r, c) - 0.5 * std::log(2 * M_PI) - ls(r, c);
      lp -= std::log(1.0 - std::tanh(u) * std::tanh(u));
      EXPECT_NEAR(sq.sample.value()(r, c), std::tanh(u), 1e-14);
    }
    EXPECT_NEAR(sq.log_prob.value()(r, 0), lp, 1e-9);
  }
}

TEST(Gaussian, SquashCorrectionStableForLargePreactivation) {
  Tape t;
  const GaussianSample pre{t.constant(Matrix::Constant(1, 1, 40.0)), t.constant(Matrix::Zero(1, 1))};
  const GaussianSample sq = tanh_squash(pre);
  EXPECT_TRUE(std::isfinite(sq.log_prob.scalar()));
  // log(1 - tanh(40)^2) ~ 2 ln 2 - 80
  EXPECT_NEAR(sq.log_prob.scalar(), -(2 * std::log(2.0) - 80.0), 1e-9);
}

TEST(Tape, IdentityAndSquareGradients) {
  ParamTensor w("w", 1, 1);
  w.value(0, 0) = 3.0;
  {
    Tape t;
    t.backward(t.param(w));
  }
  EXPECT_DOUBLE_EQ(w.grad(0, 0), 1.0);
  w.zero_grad();
  {
    Tape t;
    t.backward(square(t.param(w)));
  }
  EXPECT_DOUBLE_EQ(w.grad(0, 0), 6.0);
}

TEST(Tape, ReusedParameterAccumulates) {
  ParamTensor w("w", 1, 1);
  w.value(0, 0) = 2.0;
  Tape t;
  const Var a = t.param(w);
  t.backward(a * a + 3.0 * a);  // d/dw = 2w + 3
  EXPECT_DOUBLE_EQ(w.grad(0, 0), 7.0);
}

TEST(Tape, BackwardRequiresScalar) {
  Tape t;
  EXPECT_THROW(t.backward(t.constant(Matrix::Zero(2, 1))), std::exception);
}

TEST(Tape, DetachBlocksGradient) {
  ParamTensor w("w", 1, 1);
  w.value(0, 0) = 2.0;
  Tape t;
  const Var a = t.param(w);
  t.backward(a * detach(a));
  EXPECT_DOUBLE_EQ(w.grad(0, 0), 2.0);
}

TEST(Tape, ClampAndMinimumRouteGradient) {
  ParamTensor a("a", 1, 3), b("b", 1, 3);
  a.value = mat({{-5.0, 0.5, 1.0}});
  b.value = mat({{0.0, 0.0, 1.0}});
  Tape t;
  t.backward(sum(clamp(t.param(a), -1.0, 1.0) + minimum(t.param(a), t.param(b))));
  // clamp: only the interior element passes gradient; minimum ties go to the first operand
  EXPECT_DOUBLE_EQ(a.grad(0, 0), 0.0 + 1.0);
  EXPECT_DOUBLE_EQ(a.grad(0, 1), 1.0 + 0.0);
  EXPECT_DOUBLE_EQ(a.grad(0, 2), 1.0 + 1.0);
  EXPECT_DOUBLE_EQ(b.grad(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(b.grad(0, 2), 0.0);
}

TEST(GradCheck, RejectsOutOfRangeEps) {
  ParamTensor w("w", 1, 1);
  std::vector<ParamTensor*> ps{&w};
  auto f = [&](Tape& t) { return square(t.param(w)); };
  EXPECT_THROW(finite_diff_check(f, ps, 1e-9), std::invalid_argument);
  EXPECT_THROW(finite_diff_check(f, ps, 1e-2), std::invalid_argument);
}

TEST(GradCheck, ElementwiseOpsAgreeWithFiniteDifferences) {
  std::mt19937_64 rng(17);
  ParamTensor a("a", 3, 4), b("b", 3, 4), s("s", 1, 1);
  fill_normal(a, rng);
  fill_normal(b, rng);
  s.value(0, 0) = 0.7;
  std::vector<ParamTensor*> ps{&a, &b, &s};
  auto f = [&](Tape& t) {
    const Var A = t.param(a), B = t.param(b), S = t.param(s);
    Var y = tanh(A) * sigmoid(B) + exp(0.3 * A) - softplus(B * S);
    y = y + log(square(B) + 1.0) + concat_cols({slice_cols(A, 0, 2), slice_cols(B, 2, 2)});
    y = y + A * S;
    return mean(square(y)) + sum(sum_cols(relu(A - B)));
  };
  const GradCheckReport rep = finite_diff_check(f, ps);
  EXPECT_EQ(rep.coordinates, 25u);
  EXPECT_LE(rep.max_rel_error, 1e-4) << rep.worst_param << "[" << rep.worst_index << "]";
}

TEST(GradCheck, RandomMlpsAgreeWithFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(100 + seed);
    Mlp net("m", 4, {6, 5}, 2, rng, Activation::tanh, Activation::tanh);
    const Matrix x = standard_normal(7, 4, rng);
    const Matrix target = standard_normal(7, 2, rng);
    auto f = [&](Tape& t) { return mean(square(net.forward(t, t.constant(x)) - t.constant(target))); };
    auto ps = net.params();
    const GradCheckReport rep = finite_diff_check(f, ps);
    EXPECT_LE(rep.max_rel_error, 1e-4) << "seed " << seed << " " << rep.worst_param;
  }
}

TEST(GradCheck, LstmAndSquashedGaussianAgreeWithFiniteDifferences) {
  std::mt19937_64 rng(23);
  LstmCellParams cell("cell", 3, 4, rng);
  Mlp head("head", 4, {}, 4, rng);
  const Matrix xs[3] = {standard_normal(2, 3, rng), standard_normal(2, 3, rng), standard_normal(2, 3, rng)};
  const Matrix noise = standard_normal(2, 2, rng);
  auto f = [&](Tape& t) {
    Var h = t.constant(Matrix::Zero(2, 4)), c = t.constant(Matrix::Zero(2, 4));
    for (const Matrix& x : xs) {
      const LstmState s = lstm_cell(t, t.constant(x), h, c, cell);
      h = s.h;
      c = s.c;
    }
    const auto [mu, ls] = split_gaussian_head(head.forward(t, h), 2);
    const GaussianSample sq = tanh_squash(gaussian_reparam(mu, ls, noise));
    return mean(sq.log_prob) + mean(square(sq.sample));
  };
  std::vector<ParamTensor*> ps = cell.params();
  for (ParamTensor* p : head.params()) ps.push_back(p);
  const GradCheckReport rep = finite_diff_check(f, ps);
  EXPECT_LE(rep.max_rel_error, 1e-4) << rep.worst_param << "[" << rep.worst_index << "]";
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParamTensor w("w", 2, 2);
  w.value = mat({{1, 2}, {3, 4}});
  const Matrix before = w.value;
  Adam opt({&w}, {});
  for (int i = 0; i < 10; ++i) opt.step();
  EXPECT_EQ(w.value, before);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParamTensor w("w", 1, 3);
  w.value = mat({{1, 1, 1}});
  w.grad = mat({{0.5, -3.0, 1e4}});
  Adam opt({&w}, {.lr = 0.01});
  opt.step();
  EXPECT_NEAR(w.value(0, 0), 1 - 0.01, 1e-8);
  EXPECT_NEAR(w.value(0, 1), 1 + 0.01, 1e-8);
  EXPECT_NEAR(w.value(0, 2), 1 - 0.01, 1e-8);
}

TEST(Adam, MinimisesQuadratic) {
  ParamTensor w("w", 1, 1);
  w.value(0, 0) = 1.0;
  Adam opt({&w}, {.lr = 0.1});
  for (int i = 0; i < 100; ++i) {
    opt.zero_grad();
    Tape t;
    t.backward(square(t.param(w)));
    opt.step();
  }
  EXPECT_LT(std::abs(w.value(0, 0)), 0.05);
}

TEST(Adam, HugeGradientsStayFinite) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> expo(-300, 300);
  ParamTensor w("w", 4, 4);
  Adam opt({&w}, {});
  for (int i = 0; i < 200; ++i) {
    for (Eigen::Index k = 0; k < w.grad.size(); ++k) w.grad.data()[k] = (k % 2 ? -1 : 1) * std::pow(10.0, expo(rng));
    opt.step();
    ASSERT_TRUE(w.value.allFinite());
  }
}

TEST(Checkpoint, RoundTripIsBitExact) {
  std::mt19937_64 rng(9);
  Mlp net("actor", 3, {5}, 2, rng);
  Adam opt(net.params(), {.lr = 1e-3});
  for (ParamTensor* p : net.params()) fill_normal(*p, rng, 1e-3), p->grad = standard_normal(p->value.rows(), p->value.cols(), rng);
  opt.step();

  Checkpoint ck;
  ck.meta["kind"] = "test";
  capture_params(ck, net.params());
  capture_optimizer(ck, "actor", opt);
  std::stringstream ss;
  write_checkpoint(ss, ck);

  std::mt19937_64 other(99);
  Mlp net2("actor", 3, {5}, 2, other);
  Adam opt2(net2.params(), {});
  const Checkpoint back = read_checkpoint(ss);
  EXPECT_EQ(back.meta.at("kind"), "test");
  restore_params(back, net2.params());
  restore_optimizer(back, "actor", opt2);
  auto p1 = net.params(), p2 = net2.params();
  for (std::size_t k = 0; k < p1.size(); ++k) {
    EXPECT_EQ(p1[k]->value, p2[k]->value);
    EXPECT_EQ(opt.first_moments()[k], opt2.first_moments()[k]);
    EXPECT_EQ(opt.second_moments()[k], opt2.second_moments()[k]);
  }
  EXPECT_EQ(opt2.step_count(), 1);
  EXPECT_DOUBLE_EQ(opt2.config().lr, 1e-3);
}

TEST(Checkpoint, RejectsIncompatibleInput) {
  std::mt19937_64 rng(1);
  Mlp small("net", 3, {4}, 2, rng), big("net", 3, {8}, 2, rng);
  Checkpoint ck;
  capture_params(ck, small.params());
  EXPECT_THROW(restore_params(ck, big.params()), CheckpointError);

  std::stringstream bad_header("not-a-checkpoint 1\nend\n");
  EXPECT_THROW(read_checkpoint(bad_header), CheckpointError);
  std::stringstream bad_version("marsec-checkpoint 99\nend\n");
  EXPECT_THROW(read_checkpoint(bad_version), CheckpointError);
  std::stringstream truncated("marsec-checkpoint 1\ntensor w 2 2\n1 2 3\n");
  EXPECT_THROW(read_checkpoint(truncated), CheckpointError);
  std::stringstream no_end("marsec-checkpoint 1\nmeta a b\n");
  EXPECT_THROW(read_checkpoint(no_end), CheckpointError);
}
