#pragma once

#include <string>

#include "substrum/corpus.hpp"
#include "substrum/substitution.hpp"

namespace test {

inline substrum::Substitution load(const std::string& name) {
  return substrum::parse_substitution(substrum::corpus_entry(name).dsl);
}

}  // namespace test
