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

#include "churnpipe/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <unordered_set>

#include "churnpipe/csv.hpp"
#include "churnpipe/error.hpp"

namespace churnpipe {
namespace {

// Column lookup with aliases so the public competition files load as-is
// next to our own canonical headers.
int find_column(const CsvReader& reader,
                const std::vector<std::string>& names) {
  for (const auto& name : names) {
    const int idx = reader.column_index(name);
    if (idx >= 0) return idx;
  }
  return -1;
}

int require_column(const CsvReader& reader, const std::string& path,
                   const std::vector<std::string>& names) {
  const int idx = find_column(reader, names);
  if (idx < 0) {
    throw DataError("missing required column '" + names.front() + "' in " +
                    path);
  }
  return idx;
}

bool parse_int(const std::string& s, long long* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(*out);
}

bool parse_date(const std::string& s, CalendarDate* out) {
  long long ordinal = 0;
  if (!parse_int(s, &ordinal)) return false;
  if (!CalendarDate::is_valid_yyyymmdd(ordinal)) return false;
  *out = CalendarDate::from_yyyymmdd(ordinal);
  return true;
}

void check_reject_budget(const std::string& path, const LoadStats& stats) {
  if (stats.rows_total == 0) return;
  const double frac = static_cast<double>(stats.rows_rejected) /
                      static_cast<double>(stats.rows_total);
  if (frac > kMaxRejectFraction) {
    throw DataError("too many malformed rows in " + path + ": " +
                    std::to_string(stats.rows_rejected) + " of " +
                    std::to_string(stats.rows_total) + " rejected");
  }
}

std::string gender_to_string(std::optional<Gender> g) {
  if (!g) return "";
  return *g == Gender::kMale ? "male" : "female";
}

std::string opt_to_string(std::optional<int> v) {
  return v ? std::to_string(*v) : "";
}

}  // namespace

std::vector<UserLogRecord> load_logs(const std::string& path,
                                     LoadStats* stats) {
  CsvReader reader(path);
  const int c_user = require_column(reader, path, {"user_id", "msno"});
  const int c_date = require_column(reader, path, {"date"});
  const int c_unq =
      require_column(reader, path, {"num_unique_songs", "num_unq"});
  const int c_secs =
      require_column(reader, path, {"seconds_played", "total_secs"});
  const int c_logins = find_column(reader, {"login_count"});  // optional

  std::vector<UserLogRecord> out;
  LoadStats local;
  while (auto row = reader.next_row()) {
    ++local.rows_total;
    UserLogRecord rec;
    rec.user_id = (*row)[c_user];
    long long unq = 0;
    double secs = 0.0;
    if (rec.user_id.empty() || !parse_date((*row)[c_date], &rec.date) ||
        !parse_int((*row)[c_unq], &unq) || unq < 0 ||
        !parse_double((*row)[c_secs], &secs)) {
      ++local.rows_rejected;
      continue;
    }
    rec.num_unique_songs = static_cast<int>(unq);
    rec.seconds_played = secs;
    if (c_logins >= 0) {
      long long logins = 0;
      if (!parse_int((*row)[c_logins], &logins) || logins < 1) {
        ++local.rows_rejected;
        continue;
      }
      rec.login_count = static_cast<int>(logins);
    }
    out.push_back(std::move(rec));
  }
  check_reject_budget(path, local);
  if (stats) *stats = local;
  std::sort(out.begin(), out.end(),
            [](const UserLogRecord& a, const UserLogRecord& b) {
              return std::tie(a.user_id, a.date) < std::tie(b.user_id, b.date);
            });
  return out;
}

std::vector<TransactionRecord> load_transactions(const std::string& path,
                                                 LoadStats* stats) {
  CsvReader reader(path);
  const int c_user = require_column(reader, path, {"user_id", "msno"});
  const int c_date = require_column(reader, path, {"transaction_date"});
  const int c_expire = require_column(reader, path, {"membership_expire_date"});
  const int c_plan_days = require_column(reader, path, {"payment_plan_days"});
  const int c_list = find_column(reader, {"plan_list_price"});
  const int c_paid = find_column(reader, {"actual_amount_paid"});
  const int c_renew = find_column(reader, {"is_auto_renew"});
  const int c_cancel = require_column(reader, path, {"is_cancel"});

  std::vector<TransactionRecord> out;
  LoadStats local;
  while (auto row = reader.next_row()) {
    ++local.rows_total;
    TransactionRecord rec;
    rec.user_id = (*row)[c_user];
    long long plan_days = 0;
    long long cancel = 0;
    if (rec.user_id.empty() ||
        !parse_date((*row)[c_date], &rec.transaction_date) ||
        !parse_date((*row)[c_expire], &rec.membership_expire_date) ||
        !parse_int((*row)[c_plan_days], &plan_days) || plan_days < 0 ||
        !parse_int((*row)[c_cancel], &cancel)) {
      ++local.rows_rejected;
      continue;
    }
    rec.payment_plan_days = static_cast<int>(plan_days);
    rec.is_cancel = cancel != 0;
    double price = 0.0;
    if (c_list >= 0 && parse_double((*row)[c_list], &price)) {
      rec.plan_list_price = price;
    }
    if (c_paid >= 0 && parse_double((*row)[c_paid], &price)) {
      rec.actual_amount_paid = price;
    }
    long long renew = 0;
    if (c_renew >= 0 && parse_int((*row)[c_renew], &renew)) {
      rec.is_auto_renew = renew != 0;
    }
    out.push_back(std::move(rec));
  }
  check_reject_budget(path, local);
  if (stats) *stats = local;
  std::sort(out.begin(), out.end(),
            [](const TransactionRecord& a, const TransactionRecord& b) {
              return std::tie(a.user_id, a.transaction_date,
                              a.membership_expire_date) <
                     std::tie(b.user_id, b.transaction_date,
                              b.membership_expire_date);
            });
  return out;
}

std::vector<MemberRecord> load_members(const std::string& path,
                                       LoadStats* stats) {
  CsvReader reader(path);
  const int c_user = require_column(reader, path, {"user_id", "msno"});
  const int c_reg = require_column(
      reader, path, {"registration_date", "registration_init_time"});
  const int c_birth = find_column(reader, {"birth_year", "bd"});
  const int c_gender = find_column(reader, {"gender"});
  const int c_city = find_column(reader, {"city"});
  const int c_via = find_column(reader, {"registered_via"});

  std::vector<MemberRecord> out;
  LoadStats local;
  while (auto row = reader.next_row()) {
    ++local.rows_total;
    MemberRecord rec;
    rec.user_id = (*row)[c_user];
    if (rec.user_id.empty() || !parse_date((*row)[c_reg], &rec.registration_date)) {
      ++local.rows_rejected;
      continue;
    }
    long long v = 0;
    if (c_birth >= 0 && parse_int((*row)[c_birth], &v) && v != 0) {
      rec.birth_year = static_cast<int>(v);
    }
    if (c_gender >= 0) {
      const std::string& g = (*row)[c_gender];
      if (g == "male") rec.gender = Gender::kMale;
      else if (g == "female") rec.gender = Gender::kFemale;
    }
    if (c_city >= 0 && parse_int((*row)[c_city], &v)) {
      rec.city = static_cast<int>(v);
    }
    if (c_via >= 0 && parse_int((*row)[c_via], &v)) {
      rec.registered_via = static_cast<int>(v);
    }
    out.push_back(std::move(rec));
  }
  check_reject_budget(path, local);
  if (stats) *stats = local;
  std::sort(out.begin(), out.end(),
            [](const MemberRecord& a, const MemberRecord& b) {
              return a.user_id < b.user_id;
            });
  return out;
}

Dataset load_dataset(const std::string& dir) {
  Dataset d;
  d.logs = load_logs(dir + "/logs.csv");
  d.transactions = load_transactions(dir + "/transactions.csv");
  d.members = load_members(dir + "/members.csv");
  return d;
}

void write_dataset(const Dataset& dataset, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    CsvWriter w(dir + "/members.csv",
                {"user_id", "registration_date", "birth_year", "gender",
                 "city", "registered_via"});
    for (const auto& m : dataset.members) {
      w.write_row({m.user_id, std::to_string(m.registration_date.to_yyyymmdd()),
                   opt_to_string(m.birth_year), gender_to_string(m.gender),
                   opt_to_string(m.city), opt_to_string(m.registered_via)});
    }
    w.close();
  }
  {
    CsvWriter w(dir + "/logs.csv", {"user_id", "date", "num_unique_songs",
                                    "seconds_played", "login_count"});
    for (const auto& r : dataset.logs) {
      w.write_row({r.user_id, std::to_string(r.date.to_yyyymmdd()),
                   std::to_string(r.num_unique_songs),
                   format_double(r.seconds_played),
                   std::to_string(r.login_count)});
    }
    w.close();
  }
  {
    CsvWriter w(dir + "/transactions.csv",
                {"user_id", "transaction_date", "membership_expire_date",
                 "payment_plan_days", "plan_list_price", "actual_amount_paid",
                 "is_auto_renew", "is_cancel"});
    for (const auto& t : dataset.transactions) {
      w.write_row({t.user_id, std::to_string(t.transaction_date.to_yyyymmdd()),
                   std::to_string(t.membership_expire_date.to_yyyymmdd()),
                   std::to_string(t.payment_plan_days),
                   format_double(t.plan_list_price),
                   format_double(t.actual_amount_paid),
                   t.is_auto_renew ? "1" : "0", t.is_cancel ? "1" : "0"});
    }
    w.close();
  }
}

int clean_reference_year(const Dataset& dataset) {
  CalendarDate latest = CalendarDate::distant_past();
  for (const auto& r : dataset.logs) latest = std::max(latest, r.date);
  for (const auto& t : dataset.transactions) {
    latest = std::max(latest, t.transaction_date);
  }
  if (latest == CalendarDate::distant_past()) {
    for (const auto& m : dataset.members) {
      latest = std::max(latest, m.registration_date);
    }
  }
  return latest.year();
}

Dataset clean(Dataset dataset) {
  std::unordered_set<std::string> known;
  known.reserve(dataset.members.size() * 2);
  for (const auto& m : dataset.members) known.insert(m.user_id);

  std::erase_if(dataset.logs, [&](const UserLogRecord& r) {
    return !known.contains(r.user_id);
  });
  std::erase_if(dataset.transactions, [&](const TransactionRecord& t) {
    return !known.contains(t.user_id);
  });

  // Reference year comes from the retained rows so repeated cleaning sees
  // the same birth-year window.
  const int ref_year = clean_reference_year(dataset);
  const int min_birth = ref_year - 90;
  const int max_birth = ref_year - 10;
  for (auto& m : dataset.members) {
    if (m.birth_year && (*m.birth_year < min_birth || *m.birth_year > max_birth)) {
      m.birth_year.reset();
    }
  }

  for (auto& r : dataset.logs) {
    r.seconds_played = std::clamp(r.seconds_played, 0.0, 86400.0);
    r.num_unique_songs = std::max(r.num_unique_songs, 0);
  }

  dataset.sort_records();
  return dataset;
}

}  // namespace churnpipe
