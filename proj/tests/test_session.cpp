#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "doctest.h"
#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"
#include "sigc/session/packages.hpp"
#include "sigc/session/session.hpp"

using namespace sigc;
using namespace sigc::session;
using namespace std::chrono_literals;

namespace {

std::vector<std::string> clip_names(int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) v.push_back("clip" + std::to_string(i));
  return v;
}

ProtocolMaterials materials() {
  ProtocolMaterials m;
  for (const char* a : {"111", "222", "333", "444", "555"}) m.hearing.push_back({std::string("h") + a, a});
  m.bandwidth_refs = {"bw0", "bw1", "bw2", "bw3", "bw4"};
  m.bandwidth_key = {{true, stimulus::kBandWideband}, {false, std::nullopt}, {true, stimulus::kBandSuperWideband},
                     {true, stimulus::kBandFullband}, {false, std::nullopt}};
  for (int i = 0; i < 4; ++i) m.jnd.push_back({"ja" + std::to_string(i), "jb" + std::to_string(i), i % 2 ? 'b' : 'a'});
  m.instruction_refs = {"inst"};
  m.loudness_ref = "loud";
  for (int i = 0; i < 7; ++i) m.training.push_back({"tr" + std::to_string(i), {{Dimension::kOverall, {2, 4}}}});
  m.controls.gold["gold"] = qc::GoldSpec{"gold", {{Dimension::kNoisiness, 1}}, 1};
  m.controls.trapping["trap"] = stimulus::TrapTarget::kWorst;
  return m;
}

std::vector<PackageSlot> plan_for(int clips, int votes) {
  std::vector<PackageSlot> plan;
  for (auto& p : build_packages(clip_names(clips), {"gold"}, {"trap"}, votes, 5)) plan.push_back({p, {}, {}, false});
  return plan;
}

std::map<Dimension, int> all(int v) {
  std::map<Dimension, int> m;
  for (Dimension d : kAllDimensions) m[d] = v;
  return m;
}

// Correct answers for any task, playing every stimulus first.
SectionOutcome answer(Session& s, const Task& t, const ProtocolMaterials& m, Timestamp now,
                      int training_vote = 3) {
  for (const auto& ref : t.stimuli) record_playback_complete(s, t, ref);
  Answers a;
  a.task_id = t.id;
  switch (t.section) {
    case Section::kHearing:
      for (const auto& h : m.hearing) a.hearing.push_back(h.answer);
      break;
    case Section::kBandwidth:
      for (const auto& k : m.bandwidth_key) a.bandwidth.push_back(k.has_noise ? qc::BandwidthAnswer::kDifferent : qc::BandwidthAnswer::kSame);
      break;
    case Section::kSetupJnd:
      for (const auto& p : m.jnd) a.jnd.push_back(p.better);
      break;
    case Section::kTraining:
      for (const auto& ref : t.stimuli) a.ratings[ref] = all(training_vote);
      break;
    case Section::kRating:
      for (const auto& ref : t.stimuli) {
        if (ref == "gold") {
          a.ratings[ref] = all(3);
          a.ratings[ref][Dimension::kNoisiness] = 1;
        } else if (ref == "trap") {
          a.ratings[ref] = all(1);
        } else {
          a.ratings[ref] = all(4);
        }
      }
      break;
    default:
      break;
  }
  return submit_section(s, t, a, m, now);
}

Task next(const Session& s, const ProtocolMaterials& m, const std::vector<PackageSlot>& plan, Timestamp now) {
  auto n = next_task(s, m, plan, now);
  REQUIRE(std::holds_alternative<Task>(n));
  return std::get<Task>(n);
}

const Timestamp t0 = from_epoch_ms(1'700'000'000'000);

}  // namespace

TEST_CASE("certificate ttls") {
  const auto setup = Certificate::issue(CertificateKind::kSetup, t0);
  CHECK(setup.ttl == Duration(2h));
  CHECK(setup.valid_at(t0 + 2h - 1ms));
  CHECK_FALSE(setup.valid_at(t0 + 2h));
  const auto training = Certificate::issue(CertificateKind::kTraining, t0);
  CHECK(training.ttl == Duration(1h));
  CHECK_FALSE(training.valid_at(t0 + 1h + 1s));
  const auto q = Certificate::issue(CertificateKind::kQualification, t0);
  CHECK_FALSE(q.ttl.has_value());
  CHECK(q.valid_at(t0 + 24h * 365));
  CHECK_FALSE(q.valid_at(t0 - 1ms));
}

TEST_CASE("full protocol walk") {
  const auto m = materials();
  auto plan = plan_for(20, 1);
  auto s = create_session("s1", "alice", m.seed);
  Timestamp now = t0;

  std::vector<Section> seen;
  for (int i = 0; i < 6; ++i) {
    const auto t = next(s, m, plan, now);
    seen.push_back(t.section);
    const auto out = answer(s, t, m, now);
    CHECK(out.passed);
    now += 1min;
  }
  CHECK(seen == std::vector<Section>{Section::kHearing, Section::kBandwidth, Section::kSetupJnd,
                                     Section::kInstructions, Section::kLoudnessAdjust, Section::kTraining});
  CHECK(s.has_valid(CertificateKind::kQualification, now));
  CHECK(s.has_valid(CertificateKind::kSetup, now));
  CHECK(s.has_valid(CertificateKind::kTraining, now));
  CHECK(s.bandwidth == qc::BandwidthVerdict::kFullband);

  auto r = next(s, m, plan, now);
  CHECK(r.section == Section::kRating);
  CHECK(r.reserves_package);
  CHECK(r.stimuli.size() == 12);
  reserve_package(s, plan, r, now);
  // Fetching again gives the same task, now without a pending reservation.
  auto again = next(s, m, plan, now);
  CHECK(again.id == r.id);
  CHECK_FALSE(again.reserves_package);
  const auto out = answer(s, again, m, now);
  CHECK(out.passed);
  REQUIRE(out.screening);
  CHECK(out.screening->accepted.size() == 10);
  complete_package(plan, out);
  CHECK(plan[*r.package_slot].completed);
}

TEST_CASE("expired certificates route back to their sections") {
  const auto m = materials();
  auto plan = plan_for(20, 2);
  auto s = create_session("s1", "bob", m.seed);
  Timestamp now = t0;
  for (int i = 0; i < 6; ++i) answer(s, next(s, m, plan, now), m, now);
  const Timestamp setup_at = s.certificate(CertificateKind::kSetup)->issued_at;

  // Training (1 h) lapses first: instructions -> loudness -> training again.
  auto t = next(s, m, plan, now + 1h + 1s);
  CHECK(t.section == Section::kInstructions);

  // Setup lapses at 2 h.
  t = next(s, m, plan, setup_at + 2h + 1s);
  CHECK(t.section == Section::kSetupJnd);

  // Qualification never lapses.
  CHECK(s.has_valid(CertificateKind::kQualification, now + 24h * 30));
}

TEST_CASE("failing sections") {
  const auto m = materials();
  auto plan = plan_for(20, 1);

  SUBCASE("hearing failure blocks") {
    auto s = create_session("s", "p", m.seed);
    auto t = next(s, m, plan, t0);
    Answers a{t.id, {"111", "000", "000", "444", "555"}, {}, {}, {}};
    const auto out = submit_section(s, t, a, m, t0);
    CHECK_FALSE(out.passed);
    CHECK(std::holds_alternative<NoWork>(next_task(s, m, plan, t0)));
  }
  SUBCASE("setup 2 of 4 gives no certificate and is retried") {
    auto s = create_session("s", "p", m.seed);
    answer(s, next(s, m, plan, t0), m, t0);
    answer(s, next(s, m, plan, t0), m, t0);
    auto t = next(s, m, plan, t0);
    REQUIRE(t.section == Section::kSetupJnd);
    Answers a;
    a.task_id = t.id;
    a.jnd = {'a', 'a', 'a', 'a'};  // keys alternate a, b, a, b
    const auto out = submit_section(s, t, a, m, t0);
    CHECK_FALSE(out.passed);
    CHECK_FALSE(out.certificate_issued.has_value());
    CHECK(next(s, m, plan, t0).section == Section::kSetupJnd);
  }
  SUBCASE("setup 4 of 4 issues a two hour certificate") {
    auto s = create_session("s", "p", m.seed);
    answer(s, next(s, m, plan, t0), m, t0);
    answer(s, next(s, m, plan, t0), m, t0);
    const auto out = answer(s, next(s, m, plan, t0), m, t0);
    CHECK(out.certificate_issued == CertificateKind::kSetup);
    CHECK(s.certificate(CertificateKind::kSetup)->ttl == Duration(2h));
  }
  SUBCASE("training always certifies and reports feedback") {
    auto s = create_session("s", "p", m.seed);
    for (int i = 0; i < 5; ++i) answer(s, next(s, m, plan, t0), m, t0);
    auto t = next(s, m, plan, t0);
    REQUIRE(t.section == Section::kTraining);
    CHECK(t.stimuli.size() == 7);
    const auto out = answer(s, t, m, t0, 5);  // overall 5 is outside [2, 4]
    CHECK(out.certificate_issued == CertificateKind::kTraining);
    CHECK(s.certificate(CertificateKind::kTraining)->ttl == Duration(1h));
    const auto off = std::count_if(out.feedback.begin(), out.feedback.end(), [](const ScaleFeedback& f) { return !f.in_range; });
    CHECK(off == 7);
    for (const auto& f : out.feedback) {
      if (!f.in_range) CHECK(f.message.find("Overall") != std::string::npos);
    }
  }
  SUBCASE("bandwidth below requirement blocks") {
    auto s = create_session("s", "p", m.seed);
    answer(s, next(s, m, plan, t0), m, t0);
    auto t = next(s, m, plan, t0);
    Answers a;
    a.task_id = t.id;
    using A = qc::BandwidthAnswer;
    a.bandwidth = {A::kDifferent, A::kSame, A::kDifferent, A::kSame, A::kSame};  // fullband missed
    const auto out = submit_section(s, t, a, m, t0);
    CHECK(out.bandwidth == qc::BandwidthVerdict::kSuperWideband);
    CHECK_FALSE(out.passed);
    CHECK(std::holds_alternative<NoWork>(next_task(s, m, plan, t0)));
  }
}

TEST_CASE("playback gate and stale tasks") {
  const auto m = materials();
  auto plan = plan_for(20, 1);
  auto s = create_session("s", "p", m.seed);
  for (int i = 0; i < 6; ++i) answer(s, next(s, m, plan, t0), m, t0);
  auto r = next(s, m, plan, t0);
  reserve_package(s, plan, r, t0);
  r = next(s, m, plan, t0);

  CHECK_THROWS_AS(record_playback_complete(s, r, "not-in-package"), ValidationError);

  Answers a;
  a.task_id = r.id;
  for (const auto& ref : r.stimuli) a.ratings[ref] = all(3);
  // Nothing played yet.
  CHECK_THROWS_AS(submit_section(s, r, a, m, t0), ValidationError);
  for (std::size_t i = 0; i + 1 < r.stimuli.size(); ++i) record_playback_complete(s, r, r.stimuli[i]);
  CHECK_THROWS_AS(submit_section(s, r, a, m, t0), ValidationError);
  record_playback_complete(s, r, r.stimuli.back());

  Answers stale = a;
  stale.task_id = "hearing-0";
  CHECK_THROWS_AS(submit_section(s, r, stale, m, t0), ConflictError);

  Answers missing = a;
  missing.ratings.begin()->second.erase(Dimension::kOverall);
  CHECK_THROWS_AS(submit_section(s, r, missing, m, t0), ValidationError);

  CHECK_NOTHROW(submit_section(s, r, a, m, t0));
}

TEST_CASE("scale order: Signal and Overall last, reshuffled per round") {
  std::set<std::vector<Dimension>> distinct;
  for (int p = 0; p < 50; ++p) {
    for (int round = 0; round < 3; ++round) {
      const auto order = draw_scale_order(2023, "p" + std::to_string(p), round);
      REQUIRE(order.size() == 7);
      CHECK(order[5] == Dimension::kSignal);
      CHECK(order[6] == Dimension::kOverall);
      std::set<Dimension> uniq(order.begin(), order.end());
      CHECK(uniq.size() == 7);
      distinct.insert(order);
    }
  }
  CHECK(distinct.size() > 20);
  CHECK(draw_scale_order(1, "x", 0) == draw_scale_order(1, "x", 0));
}

TEST_CASE("package plan conservation") {
  auto count_refs = [](const std::vector<TestPackage>& plan) {
    std::map<std::string, int> n;
    for (const auto& p : plan) {
      for (const auto& c : p.rating_clips()) ++n[c];
    }
    return n;
  };
  SUBCASE("20 clips x 5 votes") {
    const auto plan = build_packages(clip_names(20), {"g"}, {"t"}, 5, 1);
    CHECK(plan.size() == 10);
    const auto n = count_refs(plan);
    CHECK(n.size() == 20);
    for (const auto& [c, k] : n) CHECK(k == 5);
  }
  SUBCASE("10 clips x 1 vote") {
    CHECK(build_packages(clip_names(10), {"g"}, {"t"}, 1, 1).size() == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_packages(clip_names(9), {"g"}, {"t"}, 1, 1), ConfigurationError);
    CHECK_THROWS_AS(build_packages(clip_names(20), {}, {"t"}, 1, 1), ConfigurationError);
    CHECK_THROWS_AS(build_packages(clip_names(20), {"g"}, {}, 1, 1), ConfigurationError);
    CHECK_THROWS_AS(build_packages(clip_names(20), {"g"}, {"t"}, 0, 1), ConfigurationError);
  }
  SUBCASE("random sizes") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      const int clips = 10 + static_cast<int>(rng.uniform_index(60));
      const int votes = 1 + static_cast<int>(rng.uniform_index(6));
      const auto plan = build_packages(clip_names(clips), {"g1", "g2"}, {"t1"}, votes, trial);
      CHECK(plan == build_packages(clip_names(clips), {"g1", "g2"}, {"t1"}, votes, trial));
      std::size_t slots = 0;
      for (const auto& p : plan) {
        REQUIRE(p.items.size() == 12);
        CHECK(p.count(ItemKind::kRating) == 10);
        CHECK(p.count(ItemKind::kGold) == 1);
        CHECK(p.count(ItemKind::kTrapping) == 1);
        CHECK(p.items.front().kind == ItemKind::kRating);
        const auto rc = p.rating_clips();
        CHECK(std::set<std::string>(rc.begin(), rc.end()).size() == 10);
        slots += rc.size();
      }
      CHECK(slots == 10 * plan.size());
      const auto n = count_refs(plan);
      CHECK(static_cast<int>(n.size()) == clips);
      if ((clips * votes) % 10 == 0) {
        for (const auto& [c, k] : n) CHECK(k == votes);
      } else {
        // The padded last page adds at most one extra reference per clip.
        for (const auto& [c, k] : n) CHECK((k == votes || k == votes + 1));
      }
    }
  }
}

TEST_CASE("routing is a pure function and rating needs all certificates") {
  const auto m = materials();
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    auto plan = plan_for(30, 2);
    auto s = create_session("s", "p" + std::to_string(trial), m.seed);
    auto plan2 = plan;
    auto s2 = s;
    Timestamp now = t0;
    for (int step = 0; step < 40; ++step) {
      now += Duration(static_cast<long>(rng.uniform_index(90)) * 60'000);
      const auto n1 = next_task(s, m, plan, now);
      const auto n2 = next_task(s2, m, plan2, now);
      REQUIRE(n1.index() == n2.index());
      if (std::holds_alternative<NoWork>(n1)) break;
      const auto t = std::get<Task>(n1);
      CHECK(t.id == std::get<Task>(n2).id);
      CHECK(t.stimuli == std::get<Task>(n2).stimuli);
      if (t.section == Section::kRating && t.reserves_package) {
        CHECK(s.has_valid(CertificateKind::kQualification, now));
        CHECK(s.has_valid(CertificateKind::kSetup, now));
        CHECK(s.has_valid(CertificateKind::kTraining, now));
        reserve_package(s, plan, t, now);
        reserve_package(s2, plan2, t, now);
        continue;
      }
      const auto o1 = answer(s, t, m, now);
      const auto o2 = answer(s2, t, m, now);
      CHECK(o1.passed == o2.passed);
      if (o1.submission) {
        complete_package(plan, o1);
        complete_package(plan2, o2);
      }
      CHECK(s.history.size() == s2.history.size());
    }
  }
}

TEST_CASE("package reclaim and no repeated clips") {
  const auto m = materials();
  auto plan = plan_for(20, 2);
  auto a = create_session("a", "pa", m.seed);
  for (int i = 0; i < 6; ++i) answer(a, next(a, m, plan, t0), m, t0);
  auto r = next(a, m, plan, t0);
  reserve_package(a, plan, r, t0);

  auto b = create_session("b", "pb", m.seed);
  for (int i = 0; i < 6; ++i) answer(b, next(b, m, plan, t0), m, t0);
  const auto rb = next(b, m, plan, t0);
  CHECK(rb.package_slot != r.package_slot);
  // After the reclaim window, b may take a's abandoned package.
  const auto sel = select_package(plan, b, t0 + 25h);
  REQUIRE(sel);
  CHECK(*sel == 0u);

  // a rates its page; afterwards it is never offered a page sharing a clip.
  r = next(a, m, plan, t0);
  auto out = answer(a, r, m, t0);
  complete_package(plan, out);
  for (int i = 0; i < 3; ++i) {
    const auto n = next_task(a, m, plan, t0 + 1min);
    if (std::holds_alternative<NoWork>(n)) break;
    const auto t = std::get<Task>(n);
    for (const auto& c : plan[*t.package_slot].package.rating_clips()) CHECK_FALSE(a.rated_clips.contains(c));
    reserve_package(a, plan, t, t0 + 1min);
    out = answer(a, next(a, m, plan, t0 + 1min), m, t0 + 1min);
    complete_package(plan, out);
  }
}
