#include <doctest.h>

#include <random>

#include "dfvo/errors.hpp"
#include "dfvo/pnp.hpp"
#include "oracles.hpp"

using namespace dfvo;
using testoracle::make_pnp_problem;
using testoracle::random_pose;

TEST_CASE("build_3d2d: depth lookup, dropping, starvation") {
  const CameraIntrinsicsd k(100.0, 100.0, 32.0, 24.0, 64, 48);
  DepthMap depth(64, 48, 4.0f);

  MatchSet matches;
  matches.width = 64;
  matches.height = 48;
  for (int i = 0; i < 10; ++i) matches.matches.push_back({Pixel(i + 5, 10), Pixel(i + 5, 10), 0.0});

  auto corrs = build_3d2d(depth, matches, k);
  REQUIRE(corrs.size() == 10);
  CHECK((corrs[0].x - backproject(k, Pixel(5, 10), 4.0)).norm() < 1e-15);

  // one invalid depth drops exactly one correspondence
  depth.at(7, 10) = 0.0f;
  corrs = build_3d2d(depth, matches, k);
  CHECK(corrs.size() == 9);

  // all invalid -> TooFewCorrespondences
  DepthMap dead(64, 48, 0.0f);
  try {
    build_3d2d(dead, matches, k);
    FAIL("expected TooFewCorrespondences");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewCorrespondences);
  }
}

TEST_CASE("reprojection_residuals: closure, hand arithmetic, behind-camera") {
  const CameraIntrinsicsd k(720.0, 720.0, 320.0, 240.0, 640, 480);

  // 1 m forward motion, point 10 m ahead with 1 m lateral offset:
  // residual at identity = 720*(1/9 - 1/10) = 8 px.
  const RigidTransformd rel(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.0, 0.0, 1.0));
  const Point3 x_cur(1.0, 0.0, 9.0);
  const Pixel p_prev = project(k, rel * x_cur);
  std::vector<Correspondence3D2D> corrs{{x_cur, p_prev}};

  const Eigen::VectorXd at_truth = reprojection_residuals(rel, k, corrs);
  CHECK(at_truth(0) < 1e-8);

  const Eigen::VectorXd at_identity = reprojection_residuals(RigidTransformd(), k, corrs);
  CHECK(at_identity(0) == doctest::Approx(8.0).epsilon(1e-9));

  std::vector<Correspondence3D2D> behind{{Point3(0.0, 0.0, 0.5), Pixel(320.0, 240.0)}};
  const RigidTransformd back(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.0, 0.0, -1.0));
  CHECK(std::isinf(reprojection_residuals(back, k, behind)(0)));
}

TEST_CASE("reprojection jacobian matches central finite differences") {
  const CameraIntrinsicsd k = testoracle::default_camera();
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const RigidTransformd pose = random_pose(500 + trial, 8.0, 0.5);
    const auto corrs = make_pnp_problem(600 + trial, 15, pose, k);
    // evaluate at a pose near (not at) the optimum so residuals are generic
    const RigidTransformd at = compose(random_pose(700 + trial, 1.0, 0.05), pose);

    const Eigen::MatrixXd analytic = reprojection_jacobian(at, k, corrs);
    const double h = 1e-6;
    for (int axis = 0; axis < 6; ++axis) {
      Vector6<double> delta = Vector6<double>::Zero();
      delta(axis) = h;
      const RigidTransformd plus = compose(exp_se3<double>(delta), at);
      const RigidTransformd minus = compose(exp_se3<double>(Vector6<double>(-delta)), at);
      for (size_t i = 0; i < corrs.size(); ++i) {
        const Eigen::Vector2d rp = project(k, plus * corrs[i].x) - corrs[i].p_prev;
        const Eigen::Vector2d rm = project(k, minus * corrs[i].x) - corrs[i].p_prev;
        const Eigen::Vector2d fd = (rp - rm) / (2.0 * h);
        const Eigen::Vector2d an = analytic.block<2, 1>(2 * static_cast<int>(i), axis);
        const double scale = std::max(1.0, fd.norm());
        CHECK((fd - an).norm() / scale < 1e-5);
      }
    }
  }
  (void)rng;
}

TEST_CASE("solve_pnp_ransac: exact correspondences recover the metric pose") {
  const CameraIntrinsicsd k = testoracle::default_camera();
  const RigidTransformd rel = random_pose(81, 10.0, 0.8);
  const auto corrs = make_pnp_problem(82, 120, rel, k);
  const PnpEstimate est = solve_pnp_ransac(corrs, k, {}, 5);
  CHECK(est.inlier_count == 120);
  CHECK(rotation_angle_deg(Eigen::Matrix3d(est.pose.rotation().transpose() * rel.rotation())) < 0.01);
  CHECK((est.pose.translation() - rel.translation()).norm() < 1e-4);
}

TEST_CASE("solve_pnp_ransac: 30% outliers") {
  const CameraIntrinsicsd k = testoracle::default_camera();
  const RigidTransformd rel = random_pose(91, 10.0, 0.6);
  auto corrs = make_pnp_problem(92, 200, rel, k);

  std::mt19937_64 rng(93);
  std::uniform_real_distribution<double> ux(0.0, k.width - 1.0);
  std::uniform_real_distribution<double> uy(0.0, k.height - 1.0);
  std::vector<uint8_t> labels(corrs.size(), 0);
  for (size_t i = 0; i < corrs.size(); i += 3) {
    corrs[i].p_prev = Pixel(ux(rng), uy(rng));
    labels[i] = 1;
  }

  const PnpEstimate est = solve_pnp_ransac(corrs, k, {}, 6);
  CHECK(rotation_angle_deg(Eigen::Matrix3d(est.pose.rotation().transpose() * rel.rotation())) < 0.01);
  CHECK((est.pose.translation() - rel.translation()).norm() < 1e-4);
  for (size_t i = 0; i < corrs.size(); ++i) {
    if (labels[i]) CHECK(!est.inlier_mask[i]);
  }
}

TEST_CASE("solve_pnp_ransac: too few correspondences") {
  const CameraIntrinsicsd k = testoracle::default_camera();
  const auto corrs = make_pnp_problem(95, 5, random_pose(94, 5.0, 0.4), k);
  CHECK_THROWS_AS(solve_pnp_ransac(corrs, k, {}, 7), Error);
}

TEST_CASE("solve_pnp_ransac: determinism and refinement monotonicity") {
  const CameraIntrinsicsd k = testoracle::default_camera();
  const RigidTransformd rel = random_pose(96, 12.0, 0.7);
  auto corrs = make_pnp_problem(97, 150, rel, k);
  // add moderate noise so refinement has actual work to do
  std::mt19937_64 rng(98);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (auto& c : corrs) c.p_prev += Pixel(noise(rng), noise(rng));

  const PnpEstimate a = solve_pnp_ransac(corrs, k, {}, 11);
  const PnpEstimate b = solve_pnp_ransac(corrs, k, {}, 11);
  CHECK((a.pose.rotation() - b.pose.rotation()).norm() == 0.0);
  CHECK((a.pose.translation() - b.pose.translation()).norm() == 0.0);
  CHECK(a.inlier_mask == b.inlier_mask);

  // the refined pose must not be worse than the best RANSAC hypothesis on
  // the consensus it was refined over; weaker but observable: refined
  // residuals stay within the threshold for the refit consensus
  const Eigen::VectorXd residuals = reprojection_residuals(a.pose, k, corrs);
  for (size_t i = 0; i < corrs.size(); ++i) {
    if (a.inlier_mask[i]) CHECK(residuals(i) < RansacPnpParams{}.px_threshold);
  }

  // pose error stays proportional to the noise level
  CHECK(rotation_angle_deg(Eigen::Matrix3d(a.pose.rotation().transpose() * rel.rotation())) < 0.2);
  CHECK((a.pose.translation() - rel.translation()).norm() < 0.05);
}

TEST_CASE("solve_pnp_ransac: PnP output is metric (no scale ambiguity)") {
  const CameraIntrinsicsd k = testoracle::default_camera();
  // pure forward translation of known magnitude
  const RigidTransformd rel(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.0, 0.0, 1.7));
  const auto corrs = make_pnp_problem(99, 80, rel, k);
  const PnpEstimate est = solve_pnp_ransac(corrs, k, {}, 12);
  CHECK(est.pose.translation().norm() == doctest::Approx(1.7).epsilon(1e-6));
}
