// Copyright 2026 The mate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "mate/corpus.hpp"
#include "mate/discovery.hpp"

namespace mate::testing {

/// The eight-row people table used throughout the docs.
inline RawTable people_table() {
  return RawTable{{"Vorname", "Nachname", "Land", "Beruf"},
                  {{"Ahmed", "Khan", "Pakistan", "Chef"},
                   {"Muhammad", "Lee", "US", "Dancer"},
                   {"Sara", "Schmidt", "Germany", "Teacher"},
                   {"Wei", "Zhang", "China", "Engineer"},
                   {"Muhammad", "Ali", "US", "Boxer"},
                   {"Muhammad", "Lee", "Germany", "Birder"},
                   {"Anna", "Rossi", "Italy", "Painter"},
                   {"John", "Smith", "UK", "Pilot"}}};
}

/// A table with the same names in unrelated columns.
inline RawTable decoy_table() {
  return RawTable{{"Team", "Coach", "City"},
                  {{"Lee", "Muhammad", "Lahore"},
                   {"Khan", "Ahmed", "Karachi"},
                   {"Rossi", "Anna", "Milan"}}};
}

inline RawTable people_query() {
  return RawTable{{"F. Name", "L. Name", "Country", "Age"},
                  {{"Muhammad", "Lee", "US", "34"},
                   {"Sara", "Schmidt", "Germany", "41"},
                   {"Wei", "Zhang", "China", "29"},
                   {"Anna", "Rossi", "Italy", "52"},
                   {"Ahmed", "Khan", "Pakistan", "38"},
                   {"Maria", "Garcia", "Spain", "45"}}};
}

inline QueryKey people_key(std::size_t k = 1) {
  return QueryKey{people_query(), {0, 1, 2}, k};
}

}  // namespace mate::testing
