/* Copyright 2026 The Shelfread Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include "support/properties.h"

namespace shelfread::testing {

void PrintTo(const Property& p, std::ostream* os) { *os << p.name; }

namespace {

class PropertyTest : public ::testing::TestWithParam<Property> {};

TEST_P(PropertyTest, HoldsOnGeneratedCases) {
  const auto failure = RunProperty(GetParam(), kPropertyCases, 20261014);
  EXPECT_FALSE(failure.has_value()) << "case " << failure->case_index << ": " << failure->message;
}

INSTANTIATE_TEST_SUITE_P(Invariants, PropertyTest, ::testing::ValuesIn(AllProperties()),
                         [](const ::testing::TestParamInfo<Property>& info) { return info.param.name; });

}  // namespace
}  // namespace shelfread::testing
