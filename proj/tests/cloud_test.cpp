#include "vicet/cloud.hpp"
#include "vicet/cloud_io.hpp"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

using namespace vicet;

namespace {

PointCloud random_cloud(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> pos(-50.0, 50.0);
  std::uniform_real_distribution<double> stamp(0.0, 1.0);
  PointCloud c;
  c.frame = (n % 2) ? Frame::body : Frame::map;
  c.period = 0.1 + stamp(rng);
  for (int i = 0; i < n; ++i)
    c.points.push_back({Vec3(pos(rng), pos(rng), pos(rng)), stamp(rng)});
  return c;
}

}  // namespace

TEST(ScaledTime, MapsAzimuthToSweepFraction) {
  EXPECT_DOUBLE_EQ(*scaled_time_from_azimuth(0.0), 0.0);
  EXPECT_DOUBLE_EQ(*scaled_time_from_azimuth(kPi), 0.5);
  EXPECT_NEAR(*scaled_time_from_azimuth(3.0 * kPi / 2.0), 0.75, 1e-15);
}

TEST(ScaledTime, RejectsOutOfSweepAzimuths) {
  EXPECT_FALSE(scaled_time_from_azimuth(-0.1).has_value());
  EXPECT_FALSE(scaled_time_from_azimuth(2.0 * kPi).has_value());
  EXPECT_FALSE(scaled_time_from_azimuth(2.0 * kPi + 0.01).has_value());
  EXPECT_FALSE(scaled_time_from_azimuth(std::nan("")).has_value());
}

TEST(Unwarp, ZeroStateOnlyRetags) {
  std::mt19937 rng(1);
  const PointCloud c = random_cloud(rng, 40);
  const PointCloud u = unwarp(c, StateVector12{});
  ASSERT_EQ(u.size(), c.size());
  EXPECT_EQ(u.frame, Frame::map);
  EXPECT_EQ(u.period, c.period);
  for (size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ((u.points[i].position - c.points[i].position).norm(), 0.0);
    EXPECT_EQ(u.points[i].s, c.points[i].s);
  }
}

TEST(Unwarp, PureTranslationShiftsEveryPointByItsOwnLever) {
  StateVector12 x;
  x.x0 = Vec3(1, 0, 0);
  x.dx = Vec3(0.5, 0, 0);
  PointCloud c;
  c.points.push_back({{0, 0, 0}, 0.0});
  c.points.push_back({{0, 0, 0}, 1.0});
  const PointCloud u = unwarp(c, x);
  EXPECT_LT((u.points[0].position - Vec3(1.0, 0, 0)).norm(), 1e-15);
  EXPECT_LT((u.points[1].position - Vec3(1.5, 0, 0)).norm(), 1e-15);
}

TEST(Unwarp, InvertibleThroughPerPointPoses) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> ang(-0.5, 0.5);
  StateVector12 x;
  x.x0 = Vec3(2, -1, 0.5);
  x.dx = Vec3(0.6, 0.2, -0.1);
  x.theta0 = {ang(rng), ang(rng), ang(rng)};
  x.dtheta = {0.1, -0.05, 0.3};
  const PointCloud c = random_cloud(rng, 60);
  const PointCloud u = unwarp(c, x);
  for (size_t i = 0; i < c.size(); ++i) {
    const Vec3 back =
        pose_at_time(x, c.points[i].s).inverse().apply(u.points[i].position);
    EXPECT_LT((back - c.points[i].position).norm(), 1e-12);
  }
}

TEST(CloudIo, RoundTripIsBitExact) {
  std::mt19937 rng(3);
  for (int n : {0, 1, 57}) {
    PointCloud c = random_cloud(rng, n);
    c.points.push_back({Vec3(1.0 / 3.0, kPi, -1e-17), 0.999999999999});
    std::ostringstream out;
    write_cloud(c, out);
    std::istringstream in(out.str());
    const PointCloud back = read_cloud(in);
    ASSERT_EQ(back.size(), c.size());
    EXPECT_EQ(back.frame, c.frame);
    EXPECT_EQ(back.period, c.period);
    for (size_t i = 0; i < c.size(); ++i) {
      EXPECT_EQ(back.points[i].position.x(), c.points[i].position.x());
      EXPECT_EQ(back.points[i].position.y(), c.points[i].position.y());
      EXPECT_EQ(back.points[i].position.z(), c.points[i].position.z());
      EXPECT_EQ(back.points[i].s, c.points[i].s);
    }
  }
}

TEST(CloudIo, CommentsAndBlankLinesAreIgnored) {
  std::istringstream in(
      "# a map fragment\n"
      "\n"
      "vicet-cloud v1 frame=map period=0.1 count=2\n"
      "1 2 3 0   # first point\n"
      "\n"
      "4 5 6 0.5\n");
  const PointCloud c = read_cloud(in);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.frame, Frame::map);
  EXPECT_EQ(c.points[1].position.y(), 5.0);
}

TEST(CloudIo, MalformedHeaderNamesTheLine) {
  std::istringstream in("vicet-cloud v2 frame=map period=0.1 count=0\n");
  try {
    read_cloud(in, "bad.cloud");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.cloud:1"), std::string::npos);
  }
}

TEST(CloudIo, BadRecordNamesTheLine) {
  std::istringstream in(
      "vicet-cloud v1 frame=body period=0.1 count=2\n"
      "1 2 3 0\n"
      "4 five 6 0.5\n");
  try {
    read_cloud(in, "bad.cloud");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.cloud:3"), std::string::npos);
  }
}

TEST(CloudIo, CountMismatchIsAnError) {
  std::istringstream missing(
      "vicet-cloud v1 frame=body period=0.1 count=3\n"
      "1 2 3 0\n");
  EXPECT_THROW(read_cloud(missing), IoError);

  std::istringstream extra(
      "vicet-cloud v1 frame=body period=0.1 count=1\n"
      "1 2 3 0\n"
      "4 5 6 0\n");
  EXPECT_THROW(read_cloud(extra), IoError);
}

TEST(CloudIo, TimestampOutsideSweepIsAnError) {
  std::istringstream in(
      "vicet-cloud v1 frame=body period=0.1 count=1\n"
      "1 2 3 1.5\n");
  EXPECT_THROW(read_cloud(in), IoError);
}

TEST(CloudIo, UnknownFrameIsAnError) {
  std::istringstream in("vicet-cloud v1 frame=laser period=0.1 count=0\n");
  EXPECT_THROW(read_cloud(in), IoError);
}
