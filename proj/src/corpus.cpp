#include "substrum/corpus.hpp"

#include "substrum/error.hpp"

namespace substrum {

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = {
      {"ex61",
       "# bijective non-abelian, eigenvalues {3,2,1,1}\n"
       "1 -> 1 1 3\n2 -> 2 3 2\n3 -> 3 2 4\n4 -> 4 4 1\n",
       "Singular", "NoSqrtQEigenvalue", "two ergodic classes; extreme points (1,1) and (1,-1/3)"},
      {"ex62",
       "# height 2; the pure base has a coincidence\n"
       "1 -> 1 4 2\n2 -> 2 5 3\n3 -> 2 5 1\n4 -> 5 1 4\n5 -> 4 1 5\n",
       "PurelyDiscrete", "DekkingCoincidence", "pure base on 6 blocks of length 2"},
      {"ex63",
       "# bijective non-abelian, eigenvalues {3,1,0}\n"
       "0 -> 0 0 1\n1 -> 1 2 2\n2 -> 2 1 0\n",
       "Singular", "NoSqrtQEigenvalue", "second eigenvalue below sqrt(3)"},
      {"rudin_shapiro",
       "# Rudin-Shapiro: Lebesgue spectral component\n"
       "0 -> 0 1\n1 -> 0 2\n2 -> 3 1\n3 -> 3 2\n",
       "Inconclusive", "SqrtQPresent", "eigenvalues {2,+-sqrt2,0}"},
      {"modified_rudin_shapiro",
       "# bijective; singular although sqrt(2) is an eigenvalue\n"
       "0 -> 0 1\n1 -> 2 0\n2 -> 1 3\n3 -> 3 2\n",
       "Inconclusive", "SqrtQPresent", "singular spectrum is known by other means"},
      {"thue_morse",
       "# Thue-Morse\n"
       "0 -> 0 1\n1 -> 1 0\n",
       "Singular", "NoSqrtQEigenvalue", "eigenvalues {2,0}"},
      {"periodic",
       "# fixed point (01)^infinity\n"
       "0 -> 0 1 0\n1 -> 1 0 1\n",
       "Inconclusive", "PreconditionFailed(periodic)", "every letter has a single neighbourhood"},
  };
  return entries;
}

const CorpusEntry& corpus_entry(const std::string& name) {
  for (const auto& e : corpus())
    if (e.name == name) return e;
  throw Error("unknown corpus entry '" + name + "'");
}

}  // namespace substrum
