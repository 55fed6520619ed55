#include <doctest.h>

#include <set>

#include "support/fixtures.hpp"
#include "vsrboost/harness.hpp"
#include "vsrboost/metrics.hpp"

using namespace vsrboost;

namespace {

std::vector<Frame> upscaled(const std::vector<Frame>& lr, int factor) {
  std::vector<Frame> out;
  for (const auto& f : lr) out.emplace_back(fixtures::replicate_upscale(f, factor), f.index());
  return out;
}

}  // namespace

TEST_CASE("replication 0 is the identity") {
  const auto video = fixtures::panning_video(12, 16, 16, 1, 1);
  const auto inj = inject_redundancy(video, {7, 5, 0});
  CHECK(inj.frames == video);
  for (std::size_t t = 0; t < video.size(); ++t) CHECK(inj.mapping[t] == t);
  CHECK(inj.anchors.size() == 5);
}

TEST_CASE("100 frames with 10 anchors and one copy each gives 110 frames") {
  std::vector<Frame> video;
  for (int t = 0; t < 100; ++t) video.push_back(fixtures::random_frame(8, 8, 3, static_cast<std::uint32_t>(t)));
  const auto inj = inject_redundancy(video, {3, 10, 1});
  CHECK(inj.frames.size() == 110);
  CHECK(std::set<std::size_t>(inj.anchors.begin(), inj.anchors.end()).size() == 10);
  for (std::size_t t = 0; t < video.size(); ++t) CHECK(inj.frames[inj.mapping[t]] == video[t]);
  for (auto a : inj.anchors) CHECK(inj.frames[inj.mapping[a] + 1] == video[a]);
  for (std::size_t i = 0; i < inj.frames.size(); ++i) CHECK(inj.frames[i].index() == static_cast<int>(i));
}

TEST_CASE("injection ladder sizes and determinism") {
  std::vector<Frame> video;
  for (int t = 0; t < 30; ++t) video.push_back(fixtures::random_frame(4, 4, 1, static_cast<std::uint32_t>(t)));
  for (int r = 0; r <= 5; ++r) {
    const auto a = inject_redundancy(video, {11, 10, r});
    const auto b = inject_redundancy(video, {11, 10, r});
    CHECK(a.frames.size() == 30 + 10 * static_cast<std::size_t>(r));
    CHECK(a.frames == b.frames);
    CHECK(a.anchors == b.anchors);
  }
  // Anchors do not depend on the replication count.
  CHECK(inject_redundancy(video, {11, 10, 1}).anchors == inject_redundancy(video, {11, 10, 4}).anchors);
  bool any_different = false;
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    any_different |= inject_redundancy(video, {seed, 10, 1}).anchors !=
                     inject_redundancy(video, {seed + 100, 10, 1}).anchors;
  }
  CHECK(any_different);
}

TEST_CASE("injection errors") {
  const auto video = fixtures::panning_video(5, 8, 8, 1, 1);
  CHECK_THROWS_AS(inject_redundancy(video, {0, 6, 1}), InvalidArgument);
  CHECK_THROWS_AS(inject_redundancy(video, {0, 2, -1}), InvalidArgument);
}

TEST_CASE("evaluation against its own output hits the cap") {
  const auto lr = fixtures::panning_video(3, 64, 64, 3, 2);
  PipelineSpec spec;
  spec.kind = PipelineKind::boosted_video;
  const auto out = run_pipeline(spec, lr);
  const auto ev = evaluate_pipeline(spec, lr, out, Metric::psnr);
  CHECK(ev.report.mean == 99.0);
  CHECK(ev.report.frames.size() == 3);
  const auto s = evaluate_pipeline(spec, lr, out, Metric::ssim);
  CHECK(s.report.mean == 1.0);
}

TEST_CASE("bicubic pipeline scores match direct resampling") {
  const auto lr = fixtures::panning_video(2, 20, 12, 3, 4);
  std::vector<Frame> gt;
  for (const auto& f : lr) gt.emplace_back(fixtures::replicate_upscale(fixtures::textured_frame(20, 12, 3, 99), 4));
  PipelineSpec spec;
  spec.kind = PipelineKind::bicubic;
  const auto ev = evaluate_pipeline(spec, lr, gt, Metric::psnr);
  for (std::size_t t = 0; t < lr.size(); ++t) {
    CHECK(ev.report.scores[t] == psnr(resample_bicubic(lr[t], Scale::up(4)), gt[t]));
  }
}

TEST_CASE("masked evaluation covers original frames only") {
  const auto lr = fixtures::panning_video(8, 64, 64, 1, 5);
  const auto inj = inject_redundancy(lr, {1, 3, 2});
  const auto gt = upscaled(inj.frames, 4);
  PipelineSpec spec;
  spec.kind = PipelineKind::bicubic;
  const auto ev = evaluate_pipeline(spec, inj.frames, gt, Metric::psnr, inj.mapping);
  CHECK(ev.report.frames.size() == lr.size());
  CHECK(ev.report.frames == inj.mapping);
  const auto j = to_json(ev.report);
  CHECK(j["frame_count"] == lr.size());
  CHECK(j["per_frame"].size() == lr.size());
}

TEST_CASE("evaluation dimension errors") {
  const auto lr = fixtures::panning_video(2, 16, 16, 1, 1);
  PipelineSpec spec;
  spec.kind = PipelineKind::bicubic;
  CHECK_THROWS_AS(evaluate_pipeline(spec, lr, upscaled(lr, 2), Metric::psnr), InvalidArgument);
  const auto gt = upscaled(lr, 4);
  CHECK_THROWS_AS(evaluate_pipeline(spec, lr, std::span(gt).first(1), Metric::psnr), InvalidArgument);
  const std::vector<std::size_t> bad_mask{5};
  CHECK_THROWS_AS(evaluate_pipeline(spec, lr, upscaled(lr, 4), Metric::psnr, bad_mask), InvalidArgument);
}

TEST_CASE("compare_injection: dynamic pool invariant, naive baseline drifts") {
  const auto lr = fixtures::panning_video(16, 64, 64, 3, 21);
  const auto gt = upscaled(lr, 4);
  const std::vector<int> levels{0, 1, 2};
  PipelineSpec spec;

  spec.kind = PipelineKind::boosted_video;
  const auto pdp = compare_injection(spec, lr, gt, Metric::psnr, 5, 4, levels);
  REQUIRE(pdp.rows.size() == 3);
  CHECK(pdp.invariant());
  for (const auto& r : pdp.rows) CHECK(r.mean_score == pdp.rows.front().mean_score);
  CHECK(pdp.rows[2].frame_count == 24);

  spec.kind = PipelineKind::naive_sequential;
  const auto naive = compare_injection(spec, lr, gt, Metric::psnr, 5, 4, levels);
  CHECK(naive.rows[0].max_abs_diff == 0);
  CHECK(naive.rows[1].max_abs_diff > 0);
  CHECK(naive.rows[2].max_abs_diff > 0);
  CHECK_FALSE(naive.invariant());

  // Level 0 equals a direct evaluation.
  const auto direct = evaluate_pipeline(spec, lr, gt, Metric::psnr);
  CHECK(naive.rows[0].mean_score == direct.report.mean);

  const auto j = to_json(naive);
  CHECK(j["summary"]["invariant"] == false);
  CHECK(j["rows"].size() == 3);
  const auto csv = to_csv(naive);
  CHECK(csv.rfind("replication,frame_count,mean_score,max_abs_diff\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("ladder always includes level 0") {
  const auto lr = fixtures::panning_video(6, 16, 16, 1, 1);
  PipelineSpec spec;
  spec.kind = PipelineKind::bicubic;
  const std::vector<int> levels{3, 1};
  const auto t = compare_injection(spec, lr, upscaled(lr, 4), Metric::psnr, 0, 2, levels);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].replication == 0);
  CHECK(t.rows[2].replication == 3);
  CHECK(t.invariant());
}

TEST_CASE("names round trip") {
  for (auto k : {PipelineKind::bicubic, PipelineKind::boosted_frame, PipelineKind::boosted_video,
                 PipelineKind::naive_sequential}) {
    CHECK(pipeline_kind_from_string(to_string(k)) == k);
  }
  CHECK(metric_from_string("ssim") == Metric::ssim);
  CHECK_THROWS_AS(metric_from_string("lpips"), InvalidArgument);
  CHECK_THROWS_AS(pipeline_kind_from_string("edvr"), InvalidArgument);
}
