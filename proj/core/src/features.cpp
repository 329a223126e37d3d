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

#include "churnpipe/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <span>
#include <thread>
#include <utility>

#include "churnpipe/error.hpp"

namespace churnpipe {
namespace {

// Everything a user contributes to feature computation. Views into the
// dataset's sorted record vectors.
struct UserSlice {
  const MemberRecord* member = nullptr;
  std::span<const UserLogRecord> logs;
  std::span<const TransactionRecord> txns;
};

template <typename Record>
std::span<const Record> user_span(const std::vector<Record>& records,
                                  const UserId& user) {
  const auto lo = std::lower_bound(
      records.begin(), records.end(), user,
      [](const Record& r, const UserId& u) { return r.user_id < u; });
  auto hi = lo;
  while (hi != records.end() && hi->user_id == user) ++hi;
  return {records.data() + (lo - records.begin()),
          static_cast<std::size_t>(hi - lo)};
}

UserSlice slice_for(const Dataset& dataset, const UserId& user) {
  UserSlice slice;
  slice.logs = user_span(dataset.logs, user);
  slice.txns = user_span(dataset.transactions, user);
  const auto m = std::lower_bound(
      dataset.members.begin(), dataset.members.end(), user,
      [](const MemberRecord& r, const UserId& u) { return r.user_id < u; });
  if (m != dataset.members.end() && m->user_id == user) slice.member = &*m;
  return slice;
}

// Materializes the (source, signal) observation stream for one user.
// Member attributes are dated at the registration date, which keeps them
// behind the same anchor filter as everything else.
std::vector<Event> extract_events(const UserSlice& slice, Source source,
                                  Signal signal) {
  std::vector<Event> events;
  switch (source) {
    case Source::kLogs: {
      events.reserve(slice.logs.size());
      std::int32_t prev_day = INT32_MIN;
      double day_seconds = 0.0;
      auto flush_day = [&] {
        if (prev_day == INT32_MIN) return;
        if (signal == Signal::kActiveDay) {
          events.push_back({prev_day, 1.0});
        } else if (day_seconds >= kSignificantUsageSeconds) {
          events.push_back({prev_day, 1.0});
        }
      };
      for (const auto& log : slice.logs) {
        const std::int32_t day = log.date.day_number();
        switch (signal) {
          case Signal::kSecondsPlayed:
            events.push_back({day, log.seconds_played});
            break;
          case Signal::kNumUniqueSongs:
            events.push_back({day, static_cast<double>(log.num_unique_songs)});
            break;
          case Signal::kLoginCount:
            events.push_back({day, static_cast<double>(log.login_count)});
            break;
          case Signal::kActiveDay:
          case Signal::kSignificantUsage:
            // Both are day-level: collapse multiple rows on one date.
            if (day != prev_day) {
              flush_day();
              prev_day = day;
              day_seconds = 0.0;
            }
            day_seconds += log.seconds_played;
            break;
          default:
            break;
        }
      }
      if (signal == Signal::kActiveDay || signal == Signal::kSignificantUsage) {
        flush_day();
      }
      break;
    }
    case Source::kTransactions: {
      events.reserve(slice.txns.size());
      for (const auto& txn : slice.txns) {
        const std::int32_t day = txn.transaction_date.day_number();
        switch (signal) {
          case Signal::kIsCancel:
            events.push_back({day, txn.is_cancel ? 1.0 : 0.0});
            break;
          case Signal::kNoCancel:
            events.push_back({day, txn.is_cancel ? 0.0 : 1.0});
            break;
          case Signal::kIsAutoRenew:
            events.push_back({day, txn.is_auto_renew ? 1.0 : 0.0});
            break;
          case Signal::kPaymentPlanDays:
            events.push_back(
                {day, static_cast<double>(txn.payment_plan_days)});
            break;
          case Signal::kPlanListPrice:
            events.push_back({day, txn.plan_list_price});
            break;
          case Signal::kActualAmountPaid:
            events.push_back({day, txn.actual_amount_paid});
            break;
          case Signal::kTransaction:
            events.push_back({day, 1.0});
            break;
          case Signal::kMembershipExpireDate:
            events.push_back(
                {day, static_cast<double>(
                          txn.membership_expire_date.day_number())});
            break;
          default:
            break;
        }
      }
      break;
    }
    case Source::kMembers: {
      if (slice.member == nullptr) break;
      const MemberRecord& m = *slice.member;
      const std::int32_t day = m.registration_date.day_number();
      switch (signal) {
        case Signal::kRegistrationDate:
          events.push_back({day, static_cast<double>(day)});
          break;
        case Signal::kBirthYear:
          if (m.birth_year) {
            events.push_back({day, static_cast<double>(*m.birth_year)});
          }
          break;
        case Signal::kGender:
          if (m.gender) {
            events.push_back(
                {day, *m.gender == Gender::kMale ? 0.0 : 1.0});
          }
          break;
        case Signal::kCity:
          if (m.city) events.push_back({day, static_cast<double>(*m.city)});
          break;
        case Signal::kRegisteredVia:
          if (m.registered_via) {
            events.push_back({day, static_cast<double>(*m.registered_via)});
          }
          break;
        default:
          break;
      }
      break;
    }
    case Source::kMeta:
      break;
  }
  return events;
}

}  // namespace

ResolvedWindow resolve_window(const Window& window,
                              const TimePeriod& period) {
  const std::int32_t anchor = period.anchor.day_number();
  ResolvedWindow out;
  switch (window.kind) {
    case WindowKind::kAllHistory:
      out.lo = CalendarDate::distant_past().day_number();
      out.hi = anchor;
      break;
    case WindowKind::kLastDays:
      out.lo = anchor - (window.a - 1);
      out.hi = anchor;
      break;
    case WindowKind::kPriorMonth:
      // The a-th full calendar month before the period's own month.
      out.lo = period.start.month_start(-window.a).day_number();
      out.hi = period.start.month_end(-window.a).day_number();
      break;
    case WindowKind::kAnchorOffset:
      out.lo = anchor - window.a;
      out.hi = anchor - window.b;
      break;
  }
  if (out.hi > anchor) {
    throw ConfigError(
        "leakage guard: window ends " + std::to_string(out.hi - anchor) +
        " day(s) after the anchor " + period.anchor.to_string() +
        " of period '" + period.name + "'");
  }
  return out;
}

double window_aggregate(const std::vector<Event>& events,
                        const FeatureSpec& spec, const TimePeriod& period) {
  const ResolvedWindow window = resolve_window(spec.window, period);
  const std::int32_t anchor = period.anchor.day_number();

  std::size_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  double min_v = 0.0;
  double max_v = 0.0;
  double last_v = kMissingValue;
  std::int32_t last_nonzero_day = 0;
  bool any_nonzero = false;

  for (const Event& e : events) {
    if (e.day < window.lo || e.day > window.hi || is_missing(e.value)) {
      continue;
    }
    const double v = e.value;
    if (n == 0) {
      min_v = v;
      max_v = v;
    } else {
      min_v = std::min(min_v, v);
      max_v = std::max(max_v, v);
    }
    ++n;
    sum += v;
    sum_sq += v * v;
    last_v = v;  // events arrive date-sorted
    if (v != 0.0) {
      last_nonzero_day = e.day;
      any_nonzero = true;
    }
  }

  double out = kMissingValue;
  switch (spec.agg) {
    case Aggregation::kSum:
      out = sum;  // an empty window contributes 0, not missing
      break;
    case Aggregation::kCount:
      out = static_cast<double>(n);
      break;
    case Aggregation::kMean:
      out = n > 0 ? sum / static_cast<double>(n) : kMissingValue;
      break;
    case Aggregation::kMax:
      out = n > 0 ? max_v : kMissingValue;
      break;
    case Aggregation::kMin:
      out = n > 0 ? min_v : kMissingValue;
      break;
    case Aggregation::kStd: {
      if (n >= 2) {
        const double nn = static_cast<double>(n);
        const double var =
            std::max(0.0, (sum_sq - sum * sum / nn) / (nn - 1.0));
        out = std::sqrt(var);
      }
      break;
    }
    case Aggregation::kLast:
      out = n > 0 ? last_v : kMissingValue;
      break;
    case Aggregation::kDaysSinceLast:
      out = any_nonzero ? static_cast<double>(anchor - last_nonzero_day)
                        : kMissingValue;
      break;
  }

  // Date-valued aggregates carry a day number; encode it now. Relative is
  // days-before-anchor; absolute is the yyyymmdd ordinal of the date itself.
  if (is_date_valued(spec.signal) && !is_missing(out)) {
    if (spec.temporal == TemporalMethod::kRelative) {
      out = static_cast<double>(anchor) - out;
    } else if (spec.temporal == TemporalMethod::kAbsolute) {
      out = static_cast<double>(
          CalendarDate::from_day_number(static_cast<std::int32_t>(out))
              .to_yyyymmdd());
    }
  }

  if (!std::isfinite(out)) out = kMissingValue;
  return out;
}

double trend(double value_recent, double value_prior, TransformOp op) {
  if (is_missing(value_recent) || is_missing(value_prior)) {
    return kMissingValue;
  }
  double out = kMissingValue;
  switch (op) {
    case TransformOp::kDiff:
      out = value_recent - value_prior;
      break;
    case TransformOp::kRatio:
      if (value_prior == 0.0) return kMissingValue;
      out = value_recent / value_prior;
      break;
    case TransformOp::kNone:
      return kMissingValue;
  }
  if (!std::isfinite(out)) out = kMissingValue;
  return out;
}

FeatureMatrix build_features(const Dataset& dataset,
                             const std::vector<FeatureSpec>& catalog,
                             const TimePeriod& period,
                             const std::vector<UserId>& population) {
  period.validate();
  validate_catalog(catalog);
  if (!dataset.is_sorted()) {
    throw DataError("build_features requires a sorted dataset");
  }

  // Fail the whole build before any work if some window breaks the leakage
  // guard.
  for (const auto& spec : catalog) {
    if (spec.source != Source::kMeta) resolve_window(spec.window, period);
  }

  // Distinct observation streams the primary specs need, and the stream
  // each spec reads.
  std::vector<std::pair<Source, Signal>> streams;
  std::vector<int> stream_of(catalog.size(), -1);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& spec = catalog[i];
    if (spec.source == Source::kMeta) continue;
    const std::pair<Source, Signal> key{spec.source, spec.signal};
    auto it = std::find(streams.begin(), streams.end(), key);
    if (it == streams.end()) {
      streams.push_back(key);
      it = std::prev(streams.end());
    }
    stream_of[i] = static_cast<int>(it - streams.begin());
  }

  // Meta evaluation order: operands before dependents. validate_catalog
  // already rejected cycles and unknown names.
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    index_of.emplace(catalog[i].name, i);
  }
  std::vector<std::size_t> meta_order;
  std::vector<char> meta_done(catalog.size(), 0);
  auto schedule = [&](auto&& self, std::size_t i) -> void {
    if (catalog[i].source != Source::kMeta || meta_done[i]) return;
    meta_done[i] = 1;
    self(self, index_of.at(catalog[i].transform.lhs));
    self(self, index_of.at(catalog[i].transform.rhs));
    meta_order.push_back(i);
  };
  for (std::size_t i = 0; i < catalog.size(); ++i) schedule(schedule, i);

  std::vector<std::string> names;
  names.reserve(catalog.size());
  for (const auto& spec : catalog) names.push_back(spec.name);
  FeatureMatrix matrix(population, std::move(names));

  // Each row depends on one user only, so rows can be computed on any
  // number of threads with identical results.
  auto compute_rows = [&](std::size_t row_begin, std::size_t row_end) {
    std::vector<std::vector<Event>> events(streams.size());
    std::vector<double> row(catalog.size(), kMissingValue);
    for (std::size_t r = row_begin; r < row_end; ++r) {
      const UserSlice slice = slice_for(dataset, population[r]);
      for (std::size_t s = 0; s < streams.size(); ++s) {
        events[s] = extract_events(slice, streams[s].first,
                                   streams[s].second);
      }
      for (std::size_t i = 0; i < catalog.size(); ++i) {
        if (stream_of[i] < 0) continue;
        row[i] = window_aggregate(
            events[static_cast<std::size_t>(stream_of[i])], catalog[i],
            period);
      }
      for (const std::size_t i : meta_order) {
        row[i] = trend(row[index_of.at(catalog[i].transform.lhs)],
                       row[index_of.at(catalog[i].transform.rhs)],
                       catalog[i].transform.op);
      }
      for (std::size_t i = 0; i < catalog.size(); ++i) {
        matrix.set(r, i, row[i]);
      }
    }
  };

  const std::size_t n_rows = population.size();
  const unsigned hw = std::thread::hardware_concurrency();
  std::size_t n_threads = hw == 0 ? 1 : hw;
  // Below a few hundred rows the thread spawn cost dominates the work.
  if (n_rows < 512) n_threads = 1;
  n_threads = std::min<std::size_t>(n_threads, 16);

  if (n_threads <= 1) {
    compute_rows(0, n_rows);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(n_threads);
    const std::size_t chunk = (n_rows + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(n_rows, lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back([&, t, lo, hi] {
        try {
          compute_rows(lo, hi);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  return matrix;
}

}  // namespace churnpipe
