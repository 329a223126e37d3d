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

#include "churnpipe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "churnpipe/csv.hpp"
#include "churnpipe/error.hpp"

namespace churnpipe {
namespace {

constexpr std::int64_t kRangeEndOrdinal = 20170331;
constexpr int kLabelWindowDays = 30;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Span {
  CalendarDate start;   // transaction date opening the span
  CalendarDate end;     // membership expiration closing it
  bool churns_at_end = false;
};

// How a user's departure shows up in the data. Decay churners fade out of
// the listening logs first, cancel churners file an explicit cancellation,
// and quiet churners simply stop paying with no warning at all.
enum class ChurnStyle { kDecay, kCancel, kQuiet };

struct UserProfile {
  double engagement = 0.5;   // drives baseline activity and song counts
  double churn_odds = 0.1;   // per-expiration churn probability
  bool auto_renew = false;
  ChurnStyle style = ChurnStyle::kDecay;
  int plan_days = 30;
  double plan_price = 0.0;
  int ramp_days = 21;        // activity fade-out ahead of a churning expiry
  double ramp_floor = 0.1;
  bool has_vacation = false;
  CalendarDate vacation_start;
  int vacation_len = 0;
};

}  // namespace

SynthResult generate_synthetic(int n_users, int months, std::uint64_t seed) {
  if (n_users < 1) {
    throw ConfigError("generate_synthetic: n_users must be >= 1, got " +
                      std::to_string(n_users));
  }
  if (months < 1) {
    throw ConfigError("generate_synthetic: months must be >= 1, got " +
                      std::to_string(months));
  }

  const CalendarDate range_end = CalendarDate::from_yyyymmdd(kRangeEndOrdinal);
  const CalendarDate range_start = range_end.month_start(-(months - 1));
  const CalendarDate txn_horizon = range_end.add_days(kLabelWindowDays);

  SynthResult result;
  result.dataset.members.reserve(static_cast<std::size_t>(n_users));
  result.churn_odds.reserve(static_cast<std::size_t>(n_users));

  for (int idx = 0; idx < n_users; ++idx) {
    std::mt19937_64 rng(splitmix64(seed ^ (0x5851F42D4C957F2DULL *
                                           static_cast<std::uint64_t>(idx + 1))));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    char buf[16];
    std::snprintf(buf, sizeof(buf), "u%06d", idx);
    const UserId uid = buf;

    UserProfile u;
    u.engagement = unit(rng);
    u.auto_renew = unit(rng) < 0.55;
    const double style_draw = unit(rng);
    u.style = style_draw < 0.60   ? ChurnStyle::kDecay
              : style_draw < 0.85 ? ChurnStyle::kCancel
                                  : ChurnStyle::kQuiet;
    u.plan_days = unit(rng) < 0.90 ? 30 : 7;
    const int price_tier = static_cast<int>(unit(rng) * 3.0);  // 0, 1, 2
    u.plan_price = u.plan_days * (3.0 + 1.5 * price_tier);
    u.ramp_days = 10 + static_cast<int>(unit(rng) * 26.0);   // 10..35
    u.ramp_floor = 0.05 + 0.25 * unit(rng);

    std::normal_distribution<double> z_noise(0.0, 0.40);
    const double z = -2.55 + 1.6 * (1.0 - u.engagement) +
                     0.50 * (u.auto_renew ? 0.0 : 1.0) + 0.20 * price_tier +
                     z_noise(rng);
    u.churn_odds = sigmoid(z);

    u.has_vacation = unit(rng) < 0.25;
    if (u.has_vacation) {
      const int span_days = range_end.days_since(range_start);
      u.vacation_start =
          range_start.add_days(static_cast<int>(unit(rng) * span_days));
      u.vacation_len = 7 + static_cast<int>(unit(rng) * 14.0);
    }

    // Member record.
    MemberRecord member;
    member.user_id = uid;
    const int reg_back = 60 + static_cast<int>(unit(rng) * 480.0);
    member.registration_date = range_end.add_days(-reg_back);
    if (unit(rng) >= 0.06) {
      std::normal_distribution<double> birth(1988.0, 9.0);
      member.birth_year =
          std::clamp(static_cast<int>(std::lround(birth(rng))), 1935, 2005);
    }
    const double g = unit(rng);
    if (g < 0.46) member.gender = Gender::kMale;
    else if (g < 0.90) member.gender = Gender::kFemale;
    member.city = 1 + static_cast<int>(unit(rng) * 21.0);
    static constexpr int kVia[] = {3, 4, 7, 9, 13};
    member.registered_via = kVia[static_cast<int>(unit(rng) * 5.0)];

    // Subscription timeline: a chain of (transaction, expiration) spans.
    std::vector<Span> spans;
    auto emit_txn = [&](CalendarDate date, CalendarDate expire, bool cancel) {
      if (date > txn_horizon) return;
      TransactionRecord t;
      t.user_id = uid;
      t.transaction_date = date;
      t.membership_expire_date = expire;
      t.payment_plan_days = u.plan_days;
      t.plan_list_price = u.plan_price;
      t.actual_amount_paid = cancel ? 0.0 : u.plan_price;
      t.is_auto_renew = u.auto_renew;
      t.is_cancel = cancel;
      result.dataset.transactions.push_back(std::move(t));
    };

    CalendarDate txn_date = member.registration_date;
    CalendarDate expire = txn_date.add_days(u.plan_days);
    emit_txn(txn_date, expire, false);
    bool departed = false;
    while (!departed && txn_date <= txn_horizon) {
      Span span{txn_date, expire, false};
      const int span_len = expire.days_since(txn_date);
      const bool churns = unit(rng) < u.churn_odds;

      // Explicit cancellations pull the expiration forward. Churning
      // cancel-style users nearly always file one; everyone else cancels
      // now and then (plan switches, billing disputes) and then renews.
      const double p_cancel =
          churns ? (u.style == ChurnStyle::kCancel ? 0.85 : 0.05) : 0.02;
      if (span_len > 8 && unit(rng) < p_cancel) {
        const int back =
            std::min(span_len - 2, 3 + static_cast<int>(unit(rng) * 17.0));
        const CalendarDate cancel_date = expire.add_days(-back);
        if (cancel_date > txn_date) {
          emit_txn(cancel_date, cancel_date, true);
          expire = cancel_date;
          span.end = expire;
        }
      }

      span.churns_at_end = churns;
      spans.push_back(span);

      if (churns) {
        if (unit(rng) < 0.30) {
          // Lapses past the renewal window, then resubscribes.
          const int lag =
              kLabelWindowDays + 1 + static_cast<int>(unit(rng) * 70.0);
          txn_date = expire.add_days(lag);
        } else {
          departed = true;
          break;
        }
      } else {
        // Renewals straggle: auto-renew charges retry for up to ~12 days
        // (failed cards, grace periods) and manual renewals take up to four
        // weeks, so plenty of renewals are still pending at any snapshot
        // date. Both stay inside the 30-day churn window.
        const int lag = u.auto_renew
                            ? 1 + static_cast<int>(unit(rng) * 12.0)
                            : 1 + static_cast<int>(unit(rng) * 27.0);
        txn_date = expire.add_days(lag);
      }
      expire = txn_date.add_days(u.plan_days);
      emit_txn(txn_date, expire, false);
    }

    // Daily listening activity across covered days in the log range.
    const CalendarDate log_start =
        std::max(range_start, member.registration_date);
    const double base_activity = 0.30 + 0.60 * u.engagement;
    std::size_t span_cursor = 0;
    for (CalendarDate d = log_start; d <= range_end; d = d.add_days(1)) {
      while (span_cursor < spans.size() && spans[span_cursor].end < d) {
        ++span_cursor;
      }
      if (span_cursor >= spans.size()) break;
      const Span& span = spans[span_cursor];
      if (d < span.start) continue;  // lapsed gap between spans

      double decay = 1.0;
      if (span.churns_at_end && u.style == ChurnStyle::kDecay) {
        const int days_left = span.end.days_since(d);
        if (days_left < u.ramp_days) {
          decay = std::max(u.ramp_floor,
                           static_cast<double>(days_left) / u.ramp_days);
        }
      }
      double p_active = base_activity * decay;
      if (u.has_vacation && d >= u.vacation_start &&
          d < u.vacation_start.add_days(u.vacation_len)) {
        p_active *= 0.05;
      }
      if (unit(rng) >= p_active) continue;

      std::poisson_distribution<int> songs(1.5 + 20.0 * u.engagement * decay);
      UserLogRecord r;
      r.user_id = uid;
      r.date = d;
      r.num_unique_songs = 1 + songs(rng);
      r.seconds_played = std::floor(
          r.num_unique_songs * (90.0 + unit(rng) * 130.0));
      r.login_count = 1 + (unit(rng) < 0.12 ? 1 : 0);
      result.dataset.logs.push_back(std::move(r));
    }

    result.dataset.members.push_back(std::move(member));
    result.churn_odds.emplace_back(uid, u.churn_odds);
  }

  result.dataset.sort_records();
  return result;
}

void write_churn_odds(const SynthResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  CsvWriter w(dir + "/churn_odds.csv", {"user_id", "churn_odds"});
  for (const auto& [uid, odds] : result.churn_odds) {
    w.write_row({uid, format_double(odds)});
  }
  w.close();
}

std::vector<std::pair<UserId, double>> load_churn_odds(
    const std::string& path) {
  CsvReader reader(path);
  const int c_user = reader.column_index("user_id");
  const int c_odds = reader.column_index("churn_odds");
  if (c_user < 0 || c_odds < 0) {
    throw DataError("churn odds file missing required columns: " + path);
  }
  std::vector<std::pair<UserId, double>> out;
  while (auto row = reader.next_row()) {
    out.emplace_back((*row)[c_user], std::stod((*row)[c_odds]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace churnpipe
