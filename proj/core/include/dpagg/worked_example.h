// Copyright 2026 The dpagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// A single user searching three times in week 10 of 2021:
//
//   1. unrelated query, 2021-03-09, postal code 94103 (San Francisco, Large)
//   2. safety query,    2021-03-09, postal code 95023 (San Benito, Small)
//   3. intent query,    2021-03-11, postal code 95023
//
// Used by `dpagg check-example` and the bounding tests.

#ifndef DPAGG_WORKED_EXAMPLE_H_
#define DPAGG_WORKED_EXAMPLE_H_

#include <string>
#include <vector>

#include "dpagg/bounding.h"
#include "dpagg/geo.h"
#include "dpagg/model.h"

namespace dpagg {

RegionRegistry WorkedExampleRegistry();
std::vector<SearchEvent> WorkedExampleEvents();

struct WorkedExampleReplay {
  // Every candidate of every search, before bounding.
  std::vector<Candidate> expanded;
  std::vector<BoundedContribution> kept;
  RawCountTable counts;
};

WorkedExampleReplay ReplayWorkedExample(const DropPolicy& policy = {});

// Human readable tables of the replay.
std::string FormatWorkedExample(const WorkedExampleReplay& replay);

}  // namespace dpagg

#endif  // DPAGG_WORKED_EXAMPLE_H_
