// Copyright 2026 The Churnpipe Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstring>
#include <random>

#include "churnpipe/error.hpp"
#include "churnpipe/features.hpp"
#include "churnpipe/labeling.hpp"
#include "churnpipe/synth.hpp"
#include "doctest.h"

using churnpipe::Aggregation;
using churnpipe::CalendarDate;
using churnpipe::ConfigError;
using churnpipe::Dataset;
using churnpipe::Event;
using churnpipe::FeatureMatrix;
using churnpipe::FeatureSpec;
using churnpipe::is_missing;
using churnpipe::ResolvedWindow;
using churnpipe::Signal;
using churnpipe::Source;
using churnpipe::TemporalMethod;
using churnpipe::TimePeriod;
using churnpipe::TransformOp;
using churnpipe::Window;
using churnpipe::WindowKind;

namespace {

TimePeriod period_for(int year, int month, const std::string& name) {
  TimePeriod p;
  p.name = name;
  p.start = CalendarDate::from_ymd(year, month, 1);
  p.end = p.start.month_end();
  p.anchor = p.end;
  return p;
}

Window window(WindowKind kind, int a = 0, int b = 0) {
  Window w;
  w.kind = kind;
  w.a = a;
  w.b = b;
  return w;
}

FeatureSpec spec_with(Aggregation agg, Window w,
                      TemporalMethod temporal = TemporalMethod::kNone,
                      Signal signal = Signal::kSecondsPlayed) {
  FeatureSpec s;
  s.name = "probe";
  s.source = Source::kLogs;
  s.signal = signal;
  s.window = w;
  s.agg = agg;
  s.temporal = temporal;
  return s;
}

Event ev(CalendarDate d, double value) {
  Event e;
  e.day = d.day_number();
  e.value = value;
  return e;
}

churnpipe::UserLogRecord log_row(const std::string& uid, std::int64_t date,
                                 double secs, int songs = 3, int logins = 1) {
  churnpipe::UserLogRecord r;
  r.user_id = uid;
  r.date = CalendarDate::from_yyyymmdd(date);
  r.seconds_played = secs;
  r.num_unique_songs = songs;
  r.login_count = logins;
  return r;
}

churnpipe::MemberRecord member_row(const std::string& uid,
                                   std::int64_t reg_date) {
  churnpipe::MemberRecord m;
  m.user_id = uid;
  m.registration_date = CalendarDate::from_yyyymmdd(reg_date);
  return m;
}

// Drops every event dated after the period anchor.
Dataset truncate_at(const Dataset& full, CalendarDate anchor) {
  Dataset out;
  for (const auto& r : full.logs) {
    if (r.date <= anchor) out.logs.push_back(r);
  }
  for (const auto& t : full.transactions) {
    if (t.transaction_date <= anchor) out.transactions.push_back(t);
  }
  for (const auto& m : full.members) {
    if (m.registration_date <= anchor) out.members.push_back(m);
  }
  return out;
}

bool matrices_bit_identical(const FeatureMatrix& a, const FeatureMatrix& b) {
  return a.user_ids() == b.user_ids() &&
         a.feature_names() == b.feature_names() &&
         std::memcmp(a.values().data(), b.values().data(),
                     a.values().size() * sizeof(double)) == 0;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("window resolution under the January period") {
  const TimePeriod jan = period_for(2017, 1, "train");
  const auto anchor = jan.anchor.day_number();

  const ResolvedWindow all =
      churnpipe::resolve_window(window(WindowKind::kAllHistory), jan);
  CHECK(all.hi == anchor);
  CHECK(all.lo < CalendarDate::from_ymd(1990, 1, 1).day_number());

  const ResolvedWindow last14 =
      churnpipe::resolve_window(window(WindowKind::kLastDays, 14), jan);
  CHECK(last14.hi == anchor);
  CHECK(last14.lo == CalendarDate::from_ymd(2017, 1, 18).day_number());

  const ResolvedWindow prior1 =
      churnpipe::resolve_window(window(WindowKind::kPriorMonth, 1), jan);
  CHECK(prior1.lo == CalendarDate::from_ymd(2016, 12, 1).day_number());
  CHECK(prior1.hi == CalendarDate::from_ymd(2016, 12, 31).day_number());

  const ResolvedWindow prior2 =
      churnpipe::resolve_window(window(WindowKind::kPriorMonth, 2), jan);
  CHECK(prior2.lo == CalendarDate::from_ymd(2016, 11, 1).day_number());
  CHECK(prior2.hi == CalendarDate::from_ymd(2016, 11, 30).day_number());

  const ResolvedWindow offs = churnpipe::resolve_window(
      window(WindowKind::kAnchorOffset, 20, 10), jan);
  CHECK(offs.lo == anchor - 20);
  CHECK(offs.hi == anchor - 10);
}

TEST_CASE("windows reaching past the anchor trip the leakage guard") {
  const TimePeriod jan = period_for(2017, 1, "train");
  CHECK_THROWS_WITH_AS(
      churnpipe::resolve_window(window(WindowKind::kAnchorOffset, 5, -3),
                                jan),
      doctest::Contains("leakage guard"), ConfigError);
}

TEST_CASE("aggregations match hand-computed values") {
  const TimePeriod jan = period_for(2017, 1, "train");
  const Window all = window(WindowKind::kAllHistory);
  const std::vector<Event> events = {
      ev(CalendarDate::from_ymd(2017, 1, 3), 4.0),
      ev(CalendarDate::from_ymd(2017, 1, 10), 1.0),
      ev(CalendarDate::from_ymd(2017, 1, 20), 7.0),
  };

  CHECK(churnpipe::window_aggregate(events, spec_with(Aggregation::kSum, all),
                                    jan) == 12.0);
  CHECK(churnpipe::window_aggregate(events,
                                    spec_with(Aggregation::kCount, all),
                                    jan) == 3.0);
  CHECK(churnpipe::window_aggregate(events, spec_with(Aggregation::kMean, all),
                                    jan) == 4.0);
  CHECK(churnpipe::window_aggregate(events, spec_with(Aggregation::kMin, all),
                                    jan) == 1.0);
  CHECK(churnpipe::window_aggregate(events, spec_with(Aggregation::kMax, all),
                                    jan) == 7.0);
  CHECK(churnpipe::window_aggregate(events, spec_with(Aggregation::kLast, all),
                                    jan) == 7.0);
  // Sample standard deviation of {4, 1, 7} is 3.
  CHECK(churnpipe::window_aggregate(events, spec_with(Aggregation::kStd, all),
                                    jan) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("window filtering keeps only in-range events") {
  const TimePeriod jan = period_for(2017, 1, "train");
  const std::vector<Event> events = {
      ev(CalendarDate::from_ymd(2016, 12, 30), 100.0),  // outside last_days:14
      ev(CalendarDate::from_ymd(2017, 1, 25), 5.0),
  };
  CHECK(churnpipe::window_aggregate(
            events, spec_with(Aggregation::kSum, window(WindowKind::kLastDays, 14)),
            jan) == 5.0);
}

TEST_CASE("empty windows: sums and counts are zero, the rest missing") {
  const TimePeriod jan = period_for(2017, 1, "train");
  const Window w = window(WindowKind::kLastDays, 7);
  const std::vector<Event> none;
  CHECK(churnpipe::window_aggregate(none, spec_with(Aggregation::kSum, w),
                                    jan) == 0.0);
  CHECK(churnpipe::window_aggregate(none, spec_with(Aggregation::kCount, w),
                                    jan) == 0.0);
  for (const Aggregation agg :
       {Aggregation::kMean, Aggregation::kMax, Aggregation::kMin,
        Aggregation::kLast, Aggregation::kStd}) {
    CHECK(is_missing(churnpipe::window_aggregate(none, spec_with(agg, w), jan)));
  }
  // Std needs at least two observations.
  const std::vector<Event> one = {ev(CalendarDate::from_ymd(2017, 1, 5), 2.0)};
  CHECK(is_missing(churnpipe::window_aggregate(
      one, spec_with(Aggregation::kStd, w), jan)));
}

TEST_CASE("days_since_last counts only nonzero-valued events") {
  const TimePeriod jan = period_for(2017, 1, "train");
  const auto spec = spec_with(Aggregation::kDaysSinceLast,
                              window(WindowKind::kAllHistory),
                              TemporalMethod::kRelative, Signal::kActiveDay);
  const std::vector<Event> events = {
      ev(CalendarDate::from_ymd(2017, 1, 10), 1.0),
      ev(CalendarDate::from_ymd(2017, 1, 28), 0.0),  // a zero does not refresh
  };
  CHECK(churnpipe::window_aggregate(events, spec, jan) == 21.0);
  const std::vector<Event> zeros = {
      ev(CalendarDate::from_ymd(2017, 1, 10), 0.0)};
  CHECK(is_missing(churnpipe::window_aggregate(zeros, spec, jan)));
}

TEST_CASE("trend transforms: diff, ratio, and missing propagation") {
  CHECK(churnpipe::trend(7.0, 4.0, TransformOp::kDiff) == 3.0);
  CHECK(churnpipe::trend(7.0, 4.0, TransformOp::kRatio) == 1.75);
  CHECK(is_missing(churnpipe::trend(7.0, 0.0, TransformOp::kRatio)));
  CHECK(is_missing(
      churnpipe::trend(churnpipe::kMissingValue, 4.0, TransformOp::kDiff)));
  CHECK(is_missing(
      churnpipe::trend(7.0, churnpipe::kMissingValue, TransformOp::kRatio)));
}

TEST_CASE("registration and login recency under two anchors") {
  // One user registered 2017-01-25 who logged in on 2017-01-30: the
  // relative encodings are (6, 1) at the January anchor and (34, 29) at
  // the February anchor.
  Dataset data;
  data.members.push_back(member_row("u1", 20170125));
  data.logs.push_back(log_row("u1", 20170130, 1200.0));
  data.sort_records();

  const auto catalog = churnpipe::parse_catalog(
      "name=days_since_registration source=members signal=registration_date "
      "window=all agg=last temporal=relative\n"
      "name=days_since_last_login source=logs signal=active_day window=all "
      "agg=days_since_last temporal=relative\n");
  churnpipe::validate_catalog(catalog);

  const FeatureMatrix jan = churnpipe::build_features(
      data, catalog, period_for(2017, 1, "train"), {"u1"});
  CHECK(jan.at(0, 0) == 6.0);
  CHECK(jan.at(0, 1) == 1.0);

  const FeatureMatrix feb = churnpipe::build_features(
      data, catalog, period_for(2017, 2, "cv"), {"u1"});
  CHECK(feb.at(0, 0) == 34.0);
  CHECK(feb.at(0, 1) == 29.0);
}

TEST_CASE("absolute temporal encoding emits yyyymmdd ordinals") {
  Dataset data;
  data.members.push_back(member_row("u1", 20161119));
  data.sort_records();
  const auto catalog = churnpipe::parse_catalog(
      "name=reg_abs source=members signal=registration_date window=all "
      "agg=last temporal=absolute\n");
  const FeatureMatrix m = churnpipe::build_features(
      data, catalog, period_for(2017, 1, "train"), {"u1"});
  CHECK(m.at(0, 0) == 20161119.0);
}

TEST_CASE("significant usage sums a day's listening before thresholding") {
  Dataset data;
  data.members.push_back(member_row("u1", 20161001));
  // Two sessions of 900s on Jan 10 cross the 1800s bar together; the
  // single 1700s day on Jan 20 does not.
  data.logs.push_back(log_row("u1", 20170110, 900.0));
  data.logs.push_back(log_row("u1", 20170110, 900.0));
  data.logs.push_back(log_row("u1", 20170120, 1700.0));
  data.sort_records();
  const auto catalog = churnpipe::parse_catalog(
      "name=days_since_sig source=logs signal=significant_usage window=all "
      "agg=days_since_last temporal=relative\n");
  const FeatureMatrix m = churnpipe::build_features(
      data, catalog, period_for(2017, 1, "train"), {"u1"});
  CHECK(m.at(0, 0) == 21.0);  // Jan 31 - Jan 10
}

TEST_CASE("meta features compute from operands row by row") {
  Dataset data;
  data.members.push_back(member_row("u1", 20161001));
  data.members.push_back(member_row("u2", 20161001));
  data.logs.push_back(log_row("u1", 20170120, 600.0));
  data.logs.push_back(log_row("u1", 20170125, 300.0));
  // u2 has no listening at all: the ratio must stay missing.
  data.sort_records();
  const auto catalog = churnpipe::parse_catalog(
      "name=recent source=logs signal=seconds_played window=last_days:14 "
      "agg=sum\n"
      "name=older source=logs signal=seconds_played window=offset:30,15 "
      "agg=sum\n"
      "name=shift source=meta transform=ratio(recent,older)\n"
      "name=delta source=meta transform=diff(recent,older)\n");
  churnpipe::validate_catalog(catalog);
  const FeatureMatrix m = churnpipe::build_features(
      data, catalog, period_for(2017, 1, "train"), {"u1", "u2"});
  // u1: recent window [Jan 18, 31] holds both sessions; older [Jan 1, 16]
  // holds none, so sum = 0 and the ratio is missing while diff = 900.
  CHECK(m.at(0, 0) == 900.0);
  CHECK(m.at(0, 1) == 0.0);
  CHECK(is_missing(m.at(0, 2)));
  CHECK(m.at(0, 3) == 900.0);
  CHECK(m.at(1, 0) == 0.0);
  CHECK(is_missing(m.at(1, 2)));
}

TEST_CASE("population order fixes row order; unknown users get all-missing "
          "member features") {
  Dataset data;
  data.members.push_back(member_row("u1", 20161001));
  data.sort_records();
  const auto catalog = churnpipe::parse_catalog(
      "name=reg_rel source=members signal=registration_date window=all "
      "agg=last temporal=relative\n");
  const FeatureMatrix m = churnpipe::build_features(
      data, catalog, period_for(2017, 1, "train"), {"zz", "u1"});
  CHECK(m.user_ids() == std::vector<churnpipe::UserId>{"zz", "u1"});
  CHECK(is_missing(m.at(0, 0)));
  CHECK_FALSE(is_missing(m.at(1, 0)));
}

TEST_CASE("deleting post-anchor events never changes the matrix") {
  const auto catalog = churnpipe::builtin_catalog();
  std::mt19937_64 seed_rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    const auto synth = churnpipe::generate_synthetic(60, 4, seed_rng());
    const auto periods = churnpipe::default_periods();
    const auto labels = churnpipe::relabel_all(synth.dataset, periods);

    for (const auto* pair :
         {&labels.train, &labels.cv, &labels.test}) {
      std::vector<churnpipe::UserId> population;
      for (const auto& [uid, y] : pair->labels) population.push_back(uid);
      if (population.empty()) continue;

      const FeatureMatrix full = churnpipe::build_features(
          synth.dataset, catalog, pair->period, population);
      Dataset cut = truncate_at(synth.dataset, pair->period.anchor);
      cut.sort_records();
      const FeatureMatrix trimmed =
          churnpipe::build_features(cut, catalog, pair->period, population);
      CHECK(matrices_bit_identical(full, trimmed));
      CHECK(full.all_finite_or_missing());
    }
  }
}

TEST_CASE("feature building is deterministic at multithreaded row counts") {
  const auto synth = churnpipe::generate_synthetic(2200, 5, 7);
  const auto periods = churnpipe::default_periods();
  const auto labels = churnpipe::relabel_all(synth.dataset, periods);
  std::vector<churnpipe::UserId> population;
  for (const auto& [uid, y] : labels.train.labels) population.push_back(uid);
  REQUIRE(population.size() > 512);  // crosses the parallel threshold

  const auto catalog = churnpipe::builtin_catalog();
  const FeatureMatrix a = churnpipe::build_features(
      synth.dataset, catalog, periods.train, population);
  const FeatureMatrix b = churnpipe::build_features(
      synth.dataset, catalog, periods.train, population);
  CHECK(matrices_bit_identical(a, b));
}

TEST_CASE("unsorted datasets are rejected") {
  Dataset data;
  data.logs.push_back(log_row("u2", 20170110, 100.0));
  data.logs.push_back(log_row("u1", 20170110, 100.0));
  const auto catalog = churnpipe::parse_catalog(
      "name=s source=logs signal=seconds_played window=all agg=sum\n");
  CHECK_THROWS_AS(churnpipe::build_features(
                      data, catalog, period_for(2017, 1, "train"), {"u1"}),
                  churnpipe::DataError);
}

}  // TEST_SUITE
