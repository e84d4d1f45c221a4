#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "solon/solon.hpp"

using namespace solon;

namespace {
EncodedMatrix random_encodings(const MechanismConfig& cfg, std::uint64_t seed) {
  NormalSampler s(substream(seed, 0xA77AC4));
  EncodedMatrix z;
  z.values.resize(cfg.compressed_dim, cfg.workers);
  for (int c = 0; c < cfg.workers; ++c)
    for (int i = 0; i < cfg.compressed_dim; ++i) z.values(i, c) = s.next();
  return z;
}
}  // namespace

TEST_CASE("reverse gradient scales the honest encoding", "[adversary]") {
  CHECK(reverse_gradient(Eigen::VectorXd::Zero(3), -100.0) ==
        Eigen::VectorXd::Zero(3));
  Eigen::VectorXd z(2);
  z << 1, 2;
  const Eigen::VectorXd out = reverse_gradient(z, -100.0);
  CHECK(out[0] == -100.0);
  CHECK(out[1] == -200.0);
  CHECK(reverse_gradient(z, 1.0) == z);
}

TEST_CASE("constant attack fills with c", "[adversary]") {
  CHECK(constant_attack(2, 0.0) == Eigen::VectorXd::Zero(2));
  const Eigen::VectorXd v = constant_attack(3, -100.0);
  CHECK(v == Eigen::VectorXd::Constant(3, -100.0));
  const Eigen::VectorXd one = constant_attack(1, 7.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 7.0);
  CHECK_THROWS_AS(constant_attack(0, 1.0), DimensionMismatch);
}

TEST_CASE("alie statistics", "[adversary]") {
  // Identical columns: zero deviation, returns the common column.
  Eigen::MatrixXd same(2, 3);
  same << 4, 4, 4, -1, -1, -1;
  CHECK(alie(same, 1.0) == same.col(0));

  // z = 0 gives the mean.
  Eigen::MatrixXd cols(1, 2);
  cols << 0.0, 2.0;
  const Eigen::VectorXd mean_only = alie(cols, 0.0);
  CHECK(mean_only[0] == 1.0);

  // Population convention: columns {0, 2} have mean 1 and stddev 1.
  const Eigen::VectorXd shifted = alie(cols, 1.0);
  CHECK(shifted[0] == 2.0);

  // Permutation invariance.
  Eigen::MatrixXd a(2, 3), b(2, 3);
  a << 1, 5, -2, 0, 3, 3;
  b << 5, -2, 1, 3, 3, 0;
  CHECK((alie(a, 0.7) - alie(b, 0.7)).norm() < 1e-14);

  CHECK_THROWS_AS(alie(Eigen::MatrixXd(2, 0), 1.0), DimensionMismatch);
}

TEST_CASE("inject with no adversaries returns the input", "[adversary]") {
  const MechanismConfig cfg = validate_config(4, 1, 2, 2);
  const EncodedMatrix z = random_encodings(cfg, 1);
  AttackSpec spec;
  spec.kind = AttackKind::ReverseGradient;
  spec.param = -100.0;
  const InjectResult out = inject(z, spec, cfg, InjectContext{0, 0});
  CHECK(out.received.values == z.values);
  CHECK(out.truth.empty());
}

TEST_CASE("inject only touches the listed columns", "[adversary]") {
  const MechanismConfig cfg = validate_config(4, 1, 2, 2);
  const EncodedMatrix z = random_encodings(cfg, 2);
  AttackSpec spec;
  spec.kind = AttackKind::ReverseGradient;
  spec.param = -100.0;
  spec.adversaries = {2};
  const InjectResult out = inject(z, spec, cfg, InjectContext{0, 0});
  for (int c = 0; c < 4; ++c) {
    if (c == 2)
      CHECK(out.received.values.col(c) == -100.0 * z.values.col(c));
    else
      CHECK(out.received.values.col(c) == z.values.col(c));
  }
  CHECK(out.truth == std::vector<int>{2});
}

TEST_CASE("a kappa = 1 reverse gradient is zero noise", "[adversary]") {
  const MechanismConfig cfg = validate_config(4, 1, 2, 2);
  const EncodedMatrix z = random_encodings(cfg, 3);
  AttackSpec spec;
  spec.kind = AttackKind::ReverseGradient;
  spec.param = 1.0;
  spec.adversaries = {1};
  const InjectResult out = inject(z, spec, cfg, InjectContext{0, 0});
  CHECK(out.received.values == z.values);
  CHECK(out.truth.empty());  // noise column is exactly zero
  CHECK(out.adversaries == std::vector<int>{1});
}

TEST_CASE("alie columns come from the group's honest members only",
          "[adversary]") {
  const MechanismConfig cfg = validate_config(8, 1, 2, 4);  // two groups of 4
  const EncodedMatrix z = random_encodings(cfg, 4);
  AttackSpec spec;
  spec.kind = AttackKind::Alie;
  spec.param = 1.0;
  spec.adversaries = {5};  // group 1
  const InjectResult out = inject(z, spec, cfg, InjectContext{0, 0});

  // Loop oracle over group 1's honest columns {4, 6, 7}.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(cfg.compressed_dim);
  for (int c : {4, 6, 7}) mean += z.values.col(c);
  mean /= 3.0;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(cfg.compressed_dim);
  for (int c : {4, 6, 7})
    var += (z.values.col(c) - mean).cwiseAbs2();
  var /= 3.0;
  const Eigen::VectorXd expected = mean + var.cwiseSqrt();
  CHECK((out.received.values.col(5) - expected).norm() <=
        1e-12 * (1.0 + expected.norm()));
  // Other columns untouched.
  for (int c = 0; c < 8; ++c)
    if (c != 5) CHECK(out.received.values.col(c) == z.values.col(c));
}

TEST_CASE("gaussian noise corrupts exactly the chosen columns", "[adversary]") {
  const MechanismConfig cfg = validate_config(12, 2, 2, 8);
  const EncodedMatrix z = random_encodings(cfg, 5);
  AttackSpec spec;
  spec.kind = AttackKind::GaussianNoise;
  spec.param = 2.5;
  spec.adversaries = {3, 9};
  const InjectResult out = inject(z, spec, cfg, InjectContext{7, 2});
  CHECK(out.truth == std::vector<int>{3, 9});
  for (int c = 0; c < cfg.workers; ++c) {
    const bool hit = (c == 3 || c == 9);
    CHECK(((out.received.values.col(c) - z.values.col(c)).norm() > 0) == hit);
  }
  // Deterministic per (seed, iteration, worker).
  const InjectResult again = inject(z, spec, cfg, InjectContext{7, 2});
  CHECK(again.received.values == out.received.values);
}

TEST_CASE("attack specs beyond the bound are rejected", "[adversary]") {
  const MechanismConfig cfg = validate_config(4, 1, 2, 2);
  const EncodedMatrix z = random_encodings(cfg, 6);
  AttackSpec spec;
  spec.kind = AttackKind::Constant;
  spec.param = -100.0;
  spec.adversaries = {0, 2};
  CHECK_THROWS_AS(inject(z, spec, cfg, InjectContext{0, 0}), TooManyInSpec);
  spec.adversaries = {4};
  CHECK_THROWS_AS(inject(z, spec, cfg, InjectContext{0, 0}), TooManyInSpec);
  spec.adversaries = {-1};
  CHECK_THROWS_AS(inject(z, spec, cfg, InjectContext{0, 0}), TooManyInSpec);
  spec.adversaries = {};
  spec.resample = true;
  spec.count = 2;
  CHECK_THROWS_AS(inject(z, spec, cfg, InjectContext{0, 0}), TooManyInSpec);
}

TEST_CASE("resampled selection is deterministic per iteration", "[adversary]") {
  const MechanismConfig cfg = validate_config(100, 5, 10, 20);
  AttackSpec spec;
  spec.kind = AttackKind::Constant;
  spec.param = -100.0;
  spec.resample = true;
  spec.count = 5;
  const auto first = select_adversaries(spec, cfg, InjectContext{11, 0});
  CHECK(first == select_adversaries(spec, cfg, InjectContext{11, 0}));
  REQUIRE(first.size() == 5);
  for (size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i] >= 0);
    CHECK(first[i] < 100);
    if (i > 0) CHECK(first[i] > first[i - 1]);
  }
  bool any_differ = false;
  for (std::uint64_t iter = 1; iter < 10; ++iter)
    if (select_adversaries(spec, cfg, InjectContext{11, iter}) != first)
      any_differ = true;
  CHECK(any_differ);
}

TEST_CASE("noise support is confined to the adversary set", "[adversary]") {
  const MechanismConfig cfg = validate_config(12, 2, 2, 8);
  const EncodedMatrix z = random_encodings(cfg, 7);
  for (AttackKind kind : {AttackKind::ReverseGradient, AttackKind::Constant,
                          AttackKind::Alie, AttackKind::GaussianNoise}) {
    AttackSpec spec;
    spec.kind = kind;
    spec.param = (kind == AttackKind::Alie) ? 1.0 : -100.0;
    spec.adversaries = {1, 8};
    const InjectResult out = inject(z, spec, cfg, InjectContext{3, 5});
    for (int c = 0; c < cfg.workers; ++c) {
      const bool allowed = (c == 1 || c == 8);
      if (!allowed) CHECK(out.received.values.col(c) == z.values.col(c));
    }
    for (int t : out.truth) CHECK((t == 1 || t == 8));
  }
}
