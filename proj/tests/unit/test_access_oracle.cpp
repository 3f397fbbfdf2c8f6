// Copyright 2026 The medchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "access_oracle.hpp"

namespace medchain::testing {
namespace {

TEST(AccessOracle, AgreesOnHandWrittenHistory) {
  AccessOracle o;
  const Digest r = ledger::hash_content(std::string_view{"r"});
  o.add(AccessOracle::Record{r, "p"});
  o.add(AccessOracle::Delegate{"p", "rep", 1});
  o.add(AccessOracle::Grant{"k1", "rep", "d", "p", r, ac::rights_of({ac::Right::Read}), std::nullopt, 2});
  EXPECT_TRUE(o.check("d", r, ac::Right::Read, 3).allowed);
  o.add(AccessOracle::Undelegate{"p", "rep"});
  EXPECT_EQ(o.check("d", r, ac::Right::Read, 4), ac::AccessDecision::deny(ac::DenyReason::Revoked));
  o.add(AccessOracle::Delegate{"p", "rep", 5});
  EXPECT_EQ(o.check("d", r, ac::Right::Read, 6), ac::AccessDecision::deny(ac::DenyReason::Revoked));
  EXPECT_EQ(o.delegation("p", "rep").since, 5u);
}

TEST(AccessOracle, RandomSequencesMatchContracts) {
  std::uint64_t checks = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto r = run_access_sequence(seed, 80);
    ASSERT_EQ(r.mismatches, 0u) << r.first_mismatch;
    checks += r.checks;
  }
  EXPECT_GT(checks, 5000u);
}

}  // namespace
}  // namespace medchain::testing
