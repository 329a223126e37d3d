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

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "churnpipe/date.hpp"
#include "churnpipe/error.hpp"
#include "churnpipe/records.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace {

using churnpipe::CalendarDate;
using churnpipe::clean;
using churnpipe::clean_reference_year;
using churnpipe::DataError;
using churnpipe::Dataset;
using churnpipe::Gender;
using churnpipe::load_dataset;
using churnpipe::load_logs;
using churnpipe::load_members;
using churnpipe::load_transactions;
using churnpipe::LoadStats;
using churnpipe::MemberRecord;
using churnpipe::TransactionRecord;
using churnpipe::UserLogRecord;
using churnpipe::write_dataset;
using churnpipe::testing::TempDir;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
}

CalendarDate day(int yyyymmdd) { return CalendarDate::from_yyyymmdd(yyyymmdd); }

// A small but fully populated dataset touching every record field,
// including absent optionals.
Dataset sample_dataset() {
  Dataset d;
  d.members.push_back({"alice", day(20160105), 1988, Gender::kFemale, 4, 7});
  d.members.push_back(
      {"bob", day(20161120), std::nullopt, std::nullopt, std::nullopt,
       std::nullopt});
  d.logs.push_back({"alice", day(20170102), 12, 3600.5, 2});
  d.logs.push_back({"alice", day(20170103), 5, 900.0, 1});
  d.logs.push_back({"bob", day(20170115), 40, 12000.25, 3});
  d.transactions.push_back(
      {"alice", day(20170101), day(20170131), 30, 149.0, 149.0, true, false});
  d.transactions.push_back(
      {"bob", day(20170110), day(20170109), 0, 0.0, 0.0, false, true});
  d.sort_records();
  return d;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("write_dataset and load_dataset round-trip every field") {
  TempDir dir("ingest_rt");
  const Dataset original = sample_dataset();
  write_dataset(original, dir.str());
  const Dataset loaded = load_dataset(dir.str());
  CHECK(loaded == original);
}

TEST_CASE("legacy column aliases load identically to canonical names") {
  TempDir dir("ingest_alias");
  write_text(dir.file("logs.csv"),
             "msno,date,num_unq,total_secs\n"
             "alice,20170102,12,3600.5\n"
             "bob,20170115,40,12000.25\n");
  const auto logs = load_logs(dir.file("logs.csv"));
  REQUIRE(logs.size() == 2);
  CHECK(logs[0].user_id == "alice");
  CHECK(logs[0].date == day(20170102));
  CHECK(logs[0].num_unique_songs == 12);
  CHECK(logs[0].seconds_played == 3600.5);
  // login_count defaults to one when its column is absent.
  CHECK(logs[0].login_count == 1);
  CHECK(logs[1].login_count == 1);

  write_text(dir.file("members.csv"),
             "msno,registration_init_time,bd,gender,city,registered_via\n"
             "alice,20160105,29,female,4,7\n"
             "bob,20161120,0,,,\n");
  const auto members = load_members(dir.file("members.csv"));
  REQUIRE(members.size() == 2);
  CHECK(members[0].birth_year == 29);  // alias passes the raw value through
  CHECK(members[0].gender == Gender::kFemale);
  CHECK(members[0].city == 4);
  // bd=0 is the legacy "unknown" sentinel and maps to missing.
  CHECK_FALSE(members[1].birth_year.has_value());
  CHECK_FALSE(members[1].gender.has_value());
  CHECK_FALSE(members[1].city.has_value());
}

TEST_CASE("transactions load optional price columns when present") {
  TempDir dir("ingest_txn");
  write_text(dir.file("transactions.csv"),
             "user_id,transaction_date,membership_expire_date,"
             "payment_plan_days,is_cancel\n"
             "carol,20170201,20170303,30,0\n");
  const auto txns = load_transactions(dir.file("transactions.csv"));
  REQUIRE(txns.size() == 1);
  CHECK(txns[0].payment_plan_days == 30);
  CHECK(txns[0].plan_list_price == 0.0);  // column absent, default
  CHECK_FALSE(txns[0].is_auto_renew);
  CHECK_FALSE(txns[0].is_cancel);
}

TEST_CASE("loads are sorted regardless of file order") {
  TempDir dir("ingest_sort");
  write_text(dir.file("logs.csv"),
             "user_id,date,num_unique_songs,seconds_played\n"
             "zed,20170110,1,10\n"
             "alice,20170120,1,10\n"
             "alice,20170105,1,10\n");
  const auto logs = load_logs(dir.file("logs.csv"));
  REQUIRE(logs.size() == 3);
  CHECK(logs[0].user_id == "alice");
  CHECK(logs[0].date == day(20170105));
  CHECK(logs[1].user_id == "alice");
  CHECK(logs[1].date == day(20170120));
  CHECK(logs[2].user_id == "zed");
}

TEST_CASE("malformed rows reject individually inside the budget") {
  TempDir dir("ingest_budget");
  std::string text = "user_id,date,num_unique_songs,seconds_played\n";
  for (int i = 0; i < 400; ++i) {
    text += "user_" + std::to_string(i) + ",20170101,3,100\n";
  }
  text += "user_bad,20170230,3,100\n";  // February 30th does not exist
  write_text(dir.file("logs.csv"), text);

  LoadStats stats;
  const auto logs = load_logs(dir.file("logs.csv"), &stats);
  CHECK(logs.size() == 400);
  CHECK(stats.rows_total == 401);
  CHECK(stats.rows_rejected == 1);
}

TEST_CASE("loads hard-fail when rejects exceed one percent") {
  TempDir dir("ingest_overbudget");
  std::string text = "user_id,date,num_unique_songs,seconds_played\n";
  for (int i = 0; i < 50; ++i) {
    text += "user_" + std::to_string(i) + ",20170101,3,100\n";
  }
  text += "user_bad,not_a_date,3,100\n";  // 1 of 51 is ~2%
  write_text(dir.file("logs.csv"), text);
  CHECK_THROWS_AS(load_logs(dir.file("logs.csv")), DataError);
}

TEST_CASE("rejected row shapes: empty ids, negative counts, bad numbers") {
  TempDir dir("ingest_shapes");
  std::string text = "user_id,date,num_unique_songs,seconds_played\n";
  for (int i = 0; i < 600; ++i) {
    text += "user_" + std::to_string(i) + ",20170101,3,100\n";
  }
  text += ",20170101,3,100\n";          // empty id
  text += "user_a,20170101,-1,100\n";   // negative song count
  text += "user_b,20170101,x,100\n";    // unparseable int
  text += "user_c,20170101,3,oops\n";   // unparseable double
  write_text(dir.file("logs.csv"), text);

  LoadStats stats;
  const auto logs = load_logs(dir.file("logs.csv"), &stats);
  CHECK(logs.size() == 600);
  CHECK(stats.rows_rejected == 4);
}

TEST_CASE("a missing required column fails the load immediately") {
  TempDir dir("ingest_cols");
  write_text(dir.file("logs.csv"),
             "user_id,num_unique_songs,seconds_played\n"
             "alice,3,100\n");
  CHECK_THROWS_AS(load_logs(dir.file("logs.csv")), DataError);
  CHECK_THROWS_AS(load_logs(dir.file("no_such_file.csv")), DataError);
}

TEST_CASE("clean clips seconds_played to a physical day") {
  Dataset d = sample_dataset();
  d.logs[0].seconds_played = -5.0;
  d.logs[1].seconds_played = 1e9;
  const Dataset cleaned = clean(d);
  CHECK(cleaned.logs[0].seconds_played == 0.0);
  CHECK(cleaned.logs[1].seconds_played == 86400.0);
}

TEST_CASE("clean windows birth years against the reference year") {
  Dataset d = sample_dataset();
  // Latest event is the bob log on 2017-01-15, so the window is
  // [1927, 2007]: ages 10 through 90 at the reference year 2017.
  REQUIRE(clean_reference_year(d) == 2017);

  d.members[0].birth_year = 1926;  // too old by one year
  Dataset cleaned = clean(d);
  CHECK_FALSE(cleaned.members[0].birth_year.has_value());

  d.members[0].birth_year = 1927;  // exactly 90: kept
  cleaned = clean(d);
  CHECK(cleaned.members[0].birth_year == 1927);

  d.members[0].birth_year = 2007;  // exactly 10: kept
  cleaned = clean(d);
  CHECK(cleaned.members[0].birth_year == 2007);

  d.members[0].birth_year = 2008;  // too young by one year
  cleaned = clean(d);
  CHECK_FALSE(cleaned.members[0].birth_year.has_value());
}

TEST_CASE("clean_reference_year falls back to registrations") {
  Dataset d;
  d.members.push_back({"alice", day(20141130), std::nullopt, std::nullopt,
                       std::nullopt, std::nullopt});
  d.members.push_back({"bob", day(20160220), std::nullopt, std::nullopt,
                       std::nullopt, std::nullopt});
  d.sort_records();
  CHECK(clean_reference_year(d) == 2016);
}

TEST_CASE("clean drops activity of users absent from members") {
  Dataset d = sample_dataset();
  d.logs.push_back({"ghost", day(20170120), 1, 50.0, 1});
  d.transactions.push_back(
      {"ghost", day(20170105), day(20170204), 30, 99.0, 99.0, false, false});
  d.sort_records();

  const Dataset cleaned = clean(d);
  for (const auto& r : cleaned.logs) CHECK(r.user_id != "ghost");
  for (const auto& t : cleaned.transactions) CHECK(t.user_id != "ghost");
  CHECK(cleaned.logs.size() == 3);
  CHECK(cleaned.transactions.size() == 2);
}

TEST_CASE("clean is idempotent and leaves its output sorted") {
  Dataset d = sample_dataset();
  d.logs[0].seconds_played = -1.0;
  d.members[0].birth_year = 1800;
  d.logs.push_back({"ghost", day(20170120), 1, 50.0, 1});

  const Dataset once = clean(d);
  CHECK(once.is_sorted());
  const Dataset twice = clean(once);
  CHECK(twice == once);
}

}  // TEST_SUITE("ingest")
