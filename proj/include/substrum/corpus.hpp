#pragma once

#include <string>
#include <vector>

namespace substrum {

/// A bundled example substitution with the verdict the classifier must produce.
struct CorpusEntry {
  std::string name;
  std::string dsl;
  std::string expected_verdict;
  std::string expected_reason;
  std::string note;
};

const std::vector<CorpusEntry>& corpus();

/// Entry by name; throws Error when absent.
const CorpusEntry& corpus_entry(const std::string& name);

}  // namespace substrum
