#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "asv/dsptheory.hpp"
#include "asv/samplers.hpp"
#include "asv/stats.hpp"
#include "oracle.hpp"

using namespace asv;
using oracle::MatrixXd;
using oracle::VectorXd;

namespace {

const OmoriMixture& mix() { return OmoriMixture::standard(); }

std::vector<double> randn(std::size_t n, std::mt19937_64& gen, double mean = 0.0, double sd = 1.0) {
  std::normal_distribution<double> z(mean, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = z(gen);
  return v;
}

std::vector<int> rand_components(std::size_t n, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> u(0, 9);
  std::vector<int> j(n);
  for (auto& x : j) x = u(gen);
  return j;
}

void expect_canonical_matches(const GaussianCanonical& g, const oracle::Gaussian& ref, double tol) {
  const MatrixXd q = oracle::dense(g.precision);
  ASSERT_EQ(q.rows(), ref.precision.rows());
  EXPECT_LE((q - ref.precision).cwiseAbs().maxCoeff(), tol);
  const VectorXd mean = oracle::vec(g.mean());
  EXPECT_LE((mean - ref.mean()).cwiseAbs().maxCoeff(), tol);
}

oracle::Gaussian v_posterior(const DspState& d, std::span<const double> omega, const DspConfig& cfg) {
  return oracle::v_posterior(omega, d.s, d.xi, d.mu, d.phi, cfg.a, cfg.b, mix());
}

DspState random_dsp(std::size_t n, std::mt19937_64& gen, double phi) {
  DspState d;
  d.v = randn(n, gen, -2.0, 1.5);
  d.s = rand_components(n, gen);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  d.xi.resize(n);
  for (auto& x : d.xi) x = u(gen);
  d.mu = -1.3;
  d.phi = phi;
  d.xi_mu = 0.7;
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Observation indicators

TEST(UpdateJ, ForcedComponent) {
  OmoriMixture m = mix();
  for (auto& w : m.w2) w = 1e-6;
  m.w2[4] = mix().w2[4];
  const std::size_t T = 20;
  std::mt19937_64 gen(1);
  const auto y_star = randn(T, gen);
  ChainState st;
  st.h.resize(T);
  for (std::size_t t = 0; t < T; ++t) st.h[t] = y_star[t] - m.m[4];
  Rng rng = make_rng(2);
  update_j(st, y_star, m, rng);
  for (int j : st.j) EXPECT_EQ(j, 4);
}

TEST(UpdateJ, FrequenciesMatchAnalyticWeights) {
  const std::vector<double> y_star{-3.0, 0.5, -8.0};
  const std::vector<double> h{-1.0, -1.0, 2.0};
  ChainState st;
  st.h = h;
  Rng rng = make_rng(3);
  const int n = 100000;
  std::vector<std::vector<double>> freq(3, std::vector<double>(10, 0.0));
  for (int r = 0; r < n; ++r) {
    update_j(st, y_star, mix(), rng);
    for (std::size_t t = 0; t < 3; ++t) freq[t][static_cast<std::size_t>(st.j[t])] += 1.0 / n;
  }
  for (std::size_t t = 0; t < 3; ++t) {
    const auto ref = oracle::mixture_weights(y_star[t] - h[t], mix().m, mix().w2, mix().p);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(freq[t][i], ref[i], 0.01) << "t=" << t << " k=" << i;
  }
}

TEST(UpdateJ, PermutingTimePermutesDistribution) {
  const std::vector<double> y_star{-3.0, 0.5, -8.0, 1.0};
  const std::vector<double> h{-1.0, -1.0, 2.0, 0.0};
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  std::vector<double> y_p(4), h_p(4);
  for (std::size_t t = 0; t < 4; ++t) {
    y_p[t] = y_star[perm[t]];
    h_p[t] = h[perm[t]];
  }
  ChainState a, b;
  a.h = h;
  b.h = h_p;
  Rng ra = make_rng(4), rb = make_rng(5);
  const int n = 50000;
  std::vector<std::vector<double>> fa(4, std::vector<double>(10)), fb(4, std::vector<double>(10));
  for (int r = 0; r < n; ++r) {
    update_j(a, y_star, mix(), ra);
    update_j(b, y_p, mix(), rb);
    for (std::size_t t = 0; t < 4; ++t) {
      fa[t][static_cast<std::size_t>(a.j[t])] += 1.0 / n;
      fb[t][static_cast<std::size_t>(b.j[t])] += 1.0 / n;
    }
  }
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(fb[t][i], fa[perm[t]][i], 0.015);
}

// ---------------------------------------------------------------------------------------------
// Log-variance path

TEST(UpdateH, InfiniteSmoothingLimitIsFlat) {
  const std::size_t T = 40;
  std::mt19937_64 gen(6);
  const auto y_star = randn(T, gen, -1.0, 2.0);
  ChainState st;
  st.vol.v.assign(T, -30.0);
  st.vol.v[0] = 0.0;  // the initial level keeps a unit-variance prior
  st.j = rand_components(T, gen);
  Rng rng = make_rng(7);
  for (int r = 0; r < 20; ++r) {
    update_h(st, y_star, 1, false, mix(), rng);
    const auto [lo, hi] = std::minmax_element(st.h.begin(), st.h.end());
    EXPECT_LT(*hi - *lo, 1e-4);
  }
}

TEST(UpdateH, ConditionalMatchesDenseOracleAllOrders) {
  std::mt19937_64 gen(8);
  for (int k = 1; k <= 3; ++k) {
    const std::size_t T = 5 + static_cast<std::size_t>(k);
    const auto v = randn(T, gen, 0.0, 1.0);
    const auto j = rand_components(T, gen);
    const auto y_star = randn(T, gen, -1.0, 2.0);
    expect_canonical_matches(h_conditional(v, j, y_star, k, mix()), oracle::h_posterior(v, j, y_star, k, mix()), 1e-8);
  }
}

TEST(UpdateH, DrawMomentsMatchOracle) {
  const std::size_t T = 5;
  std::mt19937_64 gen(9);
  ChainState st;
  st.vol.v = randn(T, gen, 0.0, 0.5);
  st.j = rand_components(T, gen);
  const auto y_star = randn(T, gen, -1.0, 2.0);
  const auto ref = oracle::h_posterior(st.vol.v, st.j, y_star, 1, mix());
  const VectorXd mean_ref = ref.mean();
  const MatrixXd cov_ref = ref.covariance();
  Rng rng = make_rng(10);
  const int n = 20000;
  VectorXd s1 = VectorXd::Zero(T);
  MatrixXd s2 = MatrixXd::Zero(T, T);
  for (int r = 0; r < n; ++r) {
    update_h(st, y_star, 1, false, mix(), rng);
    const VectorXd h = oracle::vec(st.h);
    s1 += h;
    s2 += (h - mean_ref) * (h - mean_ref).transpose();
  }
  EXPECT_LE((s1 / n - mean_ref).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LE((s2 / n - cov_ref).cwiseAbs().maxCoeff(), 0.02);
}

TEST(UpdateH, NuggetCollapsedConditionalMatchesOracle) {
  std::mt19937_64 gen(11);
  const std::size_t T = 7;
  const auto v = randn(T, gen);
  const auto j = rand_components(T, gen);
  const auto y_star = randn(T, gen, -1.0, 2.0);
  const double s2c = 0.3;
  const auto ref = oracle::h_star_collapsed_posterior(v, j, y_star, s2c, 1, mix());
  expect_canonical_matches(h_star_collapsed_conditional(v, j, y_star, s2c, 1, mix()), ref, 1e-8);
}

// Joint (h*, h) draw: compare the h marginal against the dense joint posterior.
TEST(UpdateH, NuggetJointDrawMatchesDenseJointPosterior) {
  const std::size_t T = 4;
  std::mt19937_64 gen(12);
  ChainState st;
  st.vol.v = randn(T, gen, 0.0, 0.5);
  st.j = rand_components(T, gen);
  st.sigma2_c = 0.2;
  const auto y_star = randn(T, gen, -1.0, 2.0);
  // Joint precision over (h*, h): prior Qv on h*, h | h* ~ N(h*, s2c), y* | h ~ N(h + m_j, w2_j).
  const int n = static_cast<int>(T);
  MatrixXd q = MatrixXd::Zero(2 * n, 2 * n);
  VectorXd lin = VectorXd::Zero(2 * n);
  q.topLeftCorner(n, n) = oracle::Qv(st.vol.v, 1);
  for (int t = 0; t < n; ++t) {
    const auto jt = static_cast<std::size_t>(st.j[static_cast<std::size_t>(t)]);
    q(t, t) += 1.0 / st.sigma2_c;
    q(n + t, n + t) += 1.0 / st.sigma2_c + 1.0 / mix().w2[jt];
    q(t, n + t) -= 1.0 / st.sigma2_c;
    q(n + t, t) -= 1.0 / st.sigma2_c;
    lin(n + t) = (y_star[static_cast<std::size_t>(t)] - mix().m[jt]) / mix().w2[jt];
  }
  const VectorXd mean_ref = q.llt().solve(lin);
  const MatrixXd cov_ref = q.inverse();
  Rng rng = make_rng(13);
  const int reps = 40000;
  VectorXd s1 = VectorXd::Zero(2 * n);
  MatrixXd s2 = MatrixXd::Zero(2 * n, 2 * n);
  for (int r = 0; r < reps; ++r) {
    update_h(st, y_star, 1, true, mix(), rng);
    VectorXd x(2 * n);
    x << oracle::vec(st.h_star), oracle::vec(st.h);
    s1 += x;
    s2 += (x - mean_ref) * (x - mean_ref).transpose();
  }
  EXPECT_LE((s1 / reps - mean_ref).cwiseAbs().maxCoeff(), 0.03);
  EXPECT_LE((s2 / reps - cov_ref).cwiseAbs().maxCoeff(), 0.03);
}

// ---------------------------------------------------------------------------------------------
// Nugget

TEST(UpdateNugget, SmoothComponentConditionalMatchesOracle) {
  std::mt19937_64 gen(14);
  const std::size_t T = 5;
  const auto v = randn(T, gen);
  const auto h = randn(T, gen);
  const double s2c = 0.4;
  const auto ref = oracle::h_star_posterior(v, h, s2c, 2);
  expect_canonical_matches(h_star_conditional(v, h, s2c, 2), ref, 1e-8);
}

TEST(UpdateNugget, ZeroNoiseLimitRecoversH) {
  std::mt19937_64 gen(15);
  const std::size_t T = 30;
  const auto v = randn(T, gen);
  const auto h = randn(T, gen, 0.0, 3.0);
  const auto mean = h_star_conditional(v, h, 1e-12, 1).mean();
  for (std::size_t t = 0; t < T; ++t) EXPECT_NEAR(mean[t], h[t], 1e-6);
}

TEST(UpdateNugget, VarianceConcentratesOnResidualScale) {
  const std::size_t T = 2000;
  std::mt19937_64 gen(16);
  ChainState st;
  st.h_star = randn(T, gen);
  st.h.resize(T);
  const auto u = randn(T, gen, 0.0, std::sqrt(0.5));
  for (std::size_t t = 0; t < T; ++t) st.h[t] = st.h_star[t] + u[t];
  st.vol.v.assign(T, 0.0);
  const auto h_star0 = st.h_star;
  Rng rng = make_rng(17);
  double acc = 0.0;
  const int n = 500;
  for (int r = 0; r < n; ++r) {
    st.h_star = h_star0;
    update_nugget(st, 1, rng);
    acc += st.sigma2_c;
  }
  EXPECT_NEAR(acc / n, 0.5, 0.05);
}

// ---------------------------------------------------------------------------------------------
// DSP blocks

TEST(UpdateV, IdentityPriorWhenPhiZeroAndUnitXi) {
  std::mt19937_64 gen(18);
  const std::size_t T = 6;
  DspState d = random_dsp(T, gen, 0.0);
  d.xi.assign(T, 1.0);
  d.mu = 0.0;
  const auto omega = randn(T, gen, -2.0, 2.0);
  const auto g = v_conditional(d, omega, DspConfig{}, mix());
  MatrixXd expected = MatrixXd::Identity(T, T);
  for (std::size_t t = 0; t < T; ++t)
    expected(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) += 1.0 / mix().w2[static_cast<std::size_t>(d.s[t])];
  EXPECT_LE((oracle::dense(g.precision) - expected).cwiseAbs().maxCoeff(), 1e-14);
  expect_canonical_matches(g, v_posterior(d, omega, DspConfig{}), 1e-8);
}

TEST(UpdateV, ConditionalMatchesDenseOracle) {
  std::mt19937_64 gen(19);
  for (double phi : {-0.4, 0.6, 0.95}) {
    const std::size_t T = 9;
    const DspState d = random_dsp(T, gen, phi);
    const auto omega = randn(T, gen, -2.0, 2.0);
    DspConfig cfg;
    expect_canonical_matches(v_conditional(d, omega, cfg, mix()), v_posterior(d, omega, cfg), 1e-8);
    cfg.a = 1.5;  // asymmetric shapes switch on the innovation shift
    cfg.b = 0.5;
    expect_canonical_matches(v_conditional(d, omega, cfg, mix()), v_posterior(d, omega, cfg), 1e-8);
  }
}

TEST(UpdateS, MatchesAnalyticWeights) {
  DspState d;
  d.v = {-4.0, 0.0};
  const std::vector<double> omega{-6.0, 1.0};
  Rng rng = make_rng(20);
  const int n = 100000;
  std::vector<std::vector<double>> freq(2, std::vector<double>(10, 0.0));
  for (int r = 0; r < n; ++r) {
    update_s(d, omega, mix(), rng);
    for (std::size_t t = 0; t < 2; ++t) freq[t][static_cast<std::size_t>(d.s[t])] += 1.0 / n;
  }
  for (std::size_t t = 0; t < 2; ++t) {
    const auto ref = oracle::mixture_weights(omega[t] - d.v[t], mix().m, mix().w2, mix().p);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(freq[t][i], ref[i], 0.01);
  }
}

TEST(OmegaStar, LevelsFirstThenDifferences) {
  const std::vector<double> h{1.0, 3.0, 2.0, 2.0};
  const auto w = omega_star(h, 1, 1e-8);
  EXPECT_NEAR(w[0], std::log(1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(w[1], std::log(4.0 + 1e-8), 1e-15);
  EXPECT_NEAR(w[2], std::log(1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(w[3], std::log(1e-8), 1e-12);  // zero difference guarded by the offset
}

TEST(UpdateXi, InnovationsFollowConvention) {
  DspState d;
  d.v = {1.0, 2.0, 0.5};
  d.mu = 0.5;
  d.phi = 0.4;
  const auto eta = dsp_innovations(d);
  EXPECT_DOUBLE_EQ(eta[0], 1.0 - 0.5);
  EXPECT_DOUBLE_EQ(eta[1], 2.0 - 0.4 * 1.0 - 0.5 * 0.6);
  EXPECT_DOUBLE_EQ(eta[2], 0.5 - 0.4 * 2.0 - 0.5 * 0.6);
}

TEST(UpdateXi, DrawsTiltedByInnovation) {
  DspState d;
  d.v = {3.0, 3.0};
  d.mu = 0.0;
  d.phi = 0.0;
  DspConfig cfg;
  Rng rng = make_rng(21);
  const int n = 100000;
  double s0 = 0.0, s1 = 0.0;
  for (int r = 0; r < n; ++r) {
    update_xi(d, cfg, rng);
    s0 += d.xi[0];
    s1 += d.xi[1];
  }
  const double ref = std::tanh(1.5) / 6.0;  // E PG(1, 3)
  EXPECT_NEAR(s0 / n, ref, 0.01 * ref);
  EXPECT_NEAR(s1 / n, ref, 0.01 * ref);
}

TEST(UpdateMu, DisplayedAndExactFormsAtPhiZeroUnitXi) {
  std::mt19937_64 gen(22);
  DspState d;
  d.v = randn(6, gen, -3.0, 2.0);
  d.xi.assign(6, 1.0);
  d.phi = 0.0;
  d.xi_mu = 0.8;
  DspConfig cfg;
  // Displayed: vhat = mean of v_2..v_6 with variance 1/5; conjugate with N(0, 1/xi_mu).
  const double tail = std::accumulate(d.v.begin() + 1, d.v.end(), 0.0);
  auto g = mu_conditional(d, cfg);
  EXPECT_NEAR(g.mean, tail / (5.0 + d.xi_mu), 1e-10);
  EXPECT_NEAR(g.variance, 1.0 / (5.0 + d.xi_mu), 1e-10);
  // Exact: every v_t is a unit-precision observation of mu.
  cfg.mu_update = MuUpdate::Exact;
  const double all = std::accumulate(d.v.begin(), d.v.end(), 0.0);
  g = mu_conditional(d, cfg);
  EXPECT_NEAR(g.mean, all / (6.0 + d.xi_mu), 1e-10);
  EXPECT_NEAR(g.variance, 1.0 / (6.0 + d.xi_mu), 1e-10);
}

TEST(UpdateMu, ExactFormMatchesDenseRegression) {
  std::mt19937_64 gen(23);
  DspState d = random_dsp(8, gen, 0.7);
  DspConfig cfg;
  cfg.mu_update = MuUpdate::Exact;
  cfg.a = 1.5;
  cfg.b = 0.5;
  // A v = x mu + shift / xi + noise, x = (1, 1 - phi, ...), noise precision xi; mu ~ N(0, 1/xi_mu).
  const int T = 8;
  const VectorXd av = oracle::ar_operator(T, d.phi) * oracle::vec(d.v);
  double prec = d.xi_mu, lin = 0.0;
  for (int t = 0; t < T; ++t) {
    const double x = t == 0 ? 1.0 : 1.0 - d.phi;
    const double xi = d.xi[static_cast<std::size_t>(t)];
    prec += x * x * xi;
    lin += x * xi * (av(t) - 0.5 / xi);
  }
  const auto g = mu_conditional(d, cfg);
  EXPECT_NEAR(g.mean, lin / prec, 1e-10);
  EXPECT_NEAR(g.variance, 1.0 / prec, 1e-10);
}

TEST(UpdateMu, DisplayedFormGeneral) {
  std::mt19937_64 gen(24);
  DspState d = random_dsp(7, gen, 0.5);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 1; t < 7; ++t) {
    num += std::sqrt(d.xi[t]) * (d.v[t] - d.phi * d.v[t - 1]);
    den += std::sqrt(d.xi[t]);
  }
  const double vhat = num / ((1.0 - d.phi) * den);
  const double var = 6.0 / std::pow((1.0 - d.phi) * den, 2);
  const auto g = mu_conditional(d, DspConfig{});
  EXPECT_NEAR(g.variance, 1.0 / (1.0 / var + d.xi_mu), 1e-12);
  EXPECT_NEAR(g.mean, g.variance * vhat / var, 1e-12);
}

TEST(UpdateXiMu, TiltedByMu) {
  DspState d;
  d.mu = 2.0;
  Rng rng = make_rng(25);
  double acc = 0.0;
  const int n = 100000;
  for (int r = 0; r < n; ++r) {
    update_xi_mu(d, rng);
    acc += d.xi_mu;
  }
  EXPECT_NEAR(acc / n, std::tanh(1.0) / 4.0, 0.005);
}

TEST(UpdatePhi, HorseshoeKeepsPhiAtZero) {
  std::mt19937_64 gen(26);
  DspState d = random_dsp(20, gen, 0.0);
  DspConfig cfg;
  cfg.fix_phi = true;
  Rng rng = make_rng(27);
  for (int r = 0; r < 100; ++r) {
    update_phi(d, cfg, rng);
    EXPECT_EQ(d.phi, 0.0);
  }
}

TEST(UpdatePhi, DropsTermsAtNearZeroDenominator) {
  DspState d;
  d.v = {1.0, 1.0, 2.0, 0.5, 1.0};
  d.mu = 1.0;
  d.xi.assign(5, 1.0);
  d.phi = 0.5;
  const auto pl = phi_pseudo_likelihood(d);
  EXPECT_EQ(pl.dropped, 2u);  // predecessors v_1 and v_2 sit exactly at mu
  EXPECT_EQ(pl.kept, 2u);
  const double r3 = 0.5 * ((0.5 - 1.0) / (2.0 - 1.0) + 1.0);
  const double r4 = 0.5 * ((1.0 - 1.0) / (0.5 - 1.0) + 1.0);
  EXPECT_DOUBLE_EQ(pl.vhat, 0.5 * (r3 + r4));
  EXPECT_DOUBLE_EQ(pl.variance, (1.0 / (4.0 * 1.0) + 1.0 / (4.0 * 0.25)) / 4.0);
}

TEST(UpdatePhi, RecoversArCoefficientFromSimulatedPath) {
  Rng sim = make_rng(28);
  DspState d;
  d.v = dsp::forward_simulate_dsp({0.7, 0.0}, 1000, sim, 200);
  d.xi.assign(d.v.size(), 1.0);
  d.mu = 0.0;
  d.phi = 0.5;
  DspConfig cfg;
  Rng rng = make_rng(29);
  double acc = 0.0;
  const int burn = 200, n = 2000;
  for (int r = 0; r < burn + n; ++r) {
    update_xi(d, cfg, rng);
    update_mu(d, cfg, rng);
    update_xi_mu(d, rng);
    update_phi(d, cfg, rng);
    if (r >= burn) acc += d.phi;
  }
  const double m = acc / n;
  EXPECT_GT(m, 0.5);
  EXPECT_LT(m, 0.9);
}

// ---------------------------------------------------------------------------------------------
// Random-walk variants

TEST(UpdateRwsv, NoIncrementsGivesConjugateFloor) {
  ChainState st;
  st.h.assign(101, 2.0);
  Rng rng = make_rng(30);
  std::vector<double> draws(20000);
  for (auto& x : draws) {
    update_rwsv_variance(st, 1, rng);
    x = st.sigma2_h;
    ASSERT_TRUE(std::isfinite(x));
    ASSERT_GT(x, 0.0);
  }
  const double shape = 0.01 + 50.0, rate = 0.01;
  EXPECT_NEAR(stats::mean(draws), rate / (shape - 1.0), 0.02 * rate / (shape - 1.0));
}

TEST(UpdateRwsv, ConcentratesOnIncrementVariance) {
  std::mt19937_64 gen(31);
  const auto dh = randn(1000, gen, 0.0, 2.0);
  ChainState st;
  st.h.assign(1001, 0.0);
  for (std::size_t t = 1; t < 1001; ++t) st.h[t] = st.h[t - 1] + dh[t - 1];
  Rng rng = make_rng(32);
  double acc = 0.0;
  for (int r = 0; r < 2000; ++r) {
    update_rwsv_variance(st, 1, rng);
    acc += st.sigma2_h;
  }
  EXPECT_NEAR(acc / 2000, 4.0, 0.3);
  EXPECT_DOUBLE_EQ(st.vol.v[0], std::log(kDiffuseInitialVariance));
  EXPECT_DOUBLE_EQ(st.vol.v[500], std::log(st.sigma2_h));
}

TEST(UpdateRwsv, DoublingIncrementsQuadruplesMean) {
  std::mt19937_64 gen(33);
  const auto dh = randn(2000, gen);
  ChainState a, b;
  a.h.assign(2001, 0.0);
  b.h.assign(2001, 0.0);
  for (std::size_t t = 1; t < 2001; ++t) {
    a.h[t] = a.h[t - 1] + dh[t - 1];
    b.h[t] = b.h[t - 1] + 2.0 * dh[t - 1];
  }
  Rng rng = make_rng(34);
  double ma = 0.0, mb = 0.0;
  for (int r = 0; r < 4000; ++r) {
    update_rwsv_variance(a, 1, rng);
    update_rwsv_variance(b, 1, rng);
    ma += a.sigma2_h;
    mb += b.sigma2_h;
  }
  EXPECT_NEAR(mb / ma, 4.0, 0.05);
}

TEST(UpdateLasso, LocalPrecisionMeanDecreasesWithIncrementSize) {
  const std::vector<double> grid{0.05, 0.2, 1.0, 3.0, 8.0};
  ChainState st;
  st.h = {0.0};
  for (double g : grid) st.h.push_back(st.h.back() + g);
  Rng rng = make_rng(35);
  const double lambda2 = 2.0;
  const int n = 40000;
  std::vector<double> inv_mean(grid.size(), 0.0);
  for (int r = 0; r < n; ++r) {
    st.lambda2_bl = lambda2;
    update_lasso(st, 1, 1e-8, rng);
    for (std::size_t t = 0; t < grid.size(); ++t) inv_mean[t] += 1.0 / st.sigma2_t_bl[t] / n;
  }
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const double ref = std::sqrt(lambda2 / (grid[t] * grid[t]));
    EXPECT_NEAR(inv_mean[t], ref, 0.02 * ref);
    if (t > 0) EXPECT_LT(inv_mean[t], inv_mean[t - 1]);
  }
}

// The exponential scale mixture of normals is Laplace: kurtosis 6.
TEST(UpdateLasso, ExponentialMixtureGivesLaplaceKurtosis) {
  Rng rng = make_rng(36);
  const double lambda2 = 1.7;
  std::vector<double> dh(1000000);
  for (auto& x : dh) x = std::sqrt(sample_gamma(1.0, 0.5 * lambda2, rng)) * standard_normal(rng);
  EXPECT_NEAR(stats::excess_kurtosis(dh) + 3.0, 6.0, 0.3);
}

TEST(UpdateLasso, GlobalScaleMatchesConjugateGamma) {
  std::mt19937_64 gen(37);
  ChainState st;
  st.h = randn(100, gen);
  Rng rng = make_rng(38);
  const int n = 20000;
  std::vector<double> r(n);
  const double shape = 1.0 + 99.0;
  for (int i = 0; i < n; ++i) {
    update_lasso(st, 1, 1e-8, rng);
    const double total = std::accumulate(st.sigma2_t_bl.begin(), st.sigma2_t_bl.end(), 0.0);
    r[static_cast<std::size_t>(i)] = st.lambda2_bl * (1.0 + 0.5 * total) / shape;
  }
  // Standardized by the conditional Gamma(shape, rate) law: mean 1, variance 1 / shape.
  EXPECT_NEAR(stats::mean(r), 1.0, 0.01);
  EXPECT_NEAR(stats::variance(r), 1.0 / shape, 0.1 / shape);
}

// ---------------------------------------------------------------------------------------------
// Mean path (BTF-ASV)

TEST(UpdateBeta, ConditionalMatchesDenseOracle) {
  std::mt19937_64 gen(39);
  for (int k = 1; k <= 3; ++k) {
    const std::size_t T = 5;
    const auto y = randn(T, gen, 1.0, 2.0);
    const auto h = randn(T, gen);
    const auto v = randn(T, gen);
    const auto ref = oracle::beta_posterior(y, h, v, k);
    expect_canonical_matches(beta_conditional(y, h, v, k), ref, 1e-8);
  }
}

TEST(UpdateBeta, InfiniteSmoothingGivesPolynomialTrend) {
  std::mt19937_64 gen(40);
  const std::size_t T = 60;
  const auto y = randn(T, gen, 0.0, 1.0);
  const std::vector<double> h(T, 0.3);
  for (int k = 1; k <= 3; ++k) {
    // e^24 is stiff enough for the limit but leaves the banded solve well inside double precision.
    std::vector<double> v(T, -24.0);
    for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = std::log(1e12);
    const auto mean = beta_conditional(y, h, v, k).mean();
    // Least-squares polynomial of degree k - 1.
    MatrixXd x(T, k);
    for (std::size_t t = 0; t < T; ++t)
      for (int p = 0; p < k; ++p) x(static_cast<Eigen::Index>(t), p) = std::pow(static_cast<double>(t) / T, p);
    const VectorXd coef = x.colPivHouseholderQr().solve(oracle::vec(y));
    const VectorXd fit = x * coef;
    for (std::size_t t = 0; t < T; ++t) EXPECT_NEAR(mean[t], fit(static_cast<Eigen::Index>(t)), 1e-4) << "k=" << k;
  }
}

TEST(DspConfigTest, MirrorsSpec) {
  ModelSpec spec;
  spec.variant = Variant::ASV_HS_N;
  spec.mu_update = MuUpdate::Exact;
  const auto cfg = dsp_config(spec, 2);
  EXPECT_EQ(cfg.k, 2);
  EXPECT_TRUE(cfg.fix_phi);
  EXPECT_EQ(cfg.mu_update, MuUpdate::Exact);
  EXPECT_EQ(cfg.pg_shape(), 1);
}
