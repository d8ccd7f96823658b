#pragma once

#include <string>

#include "xrouter/common/corpus.h"

namespace xrouter::benchctl {

/// Reads a JSON-lines corpus ({"text": str, "category": int in [0,8)} per
/// line). Blank lines are skipped. Throws Error(kParse) naming the first bad
/// line, Error(kMissingCategory) if a category has no documents, and
/// Error(kIo) if the file cannot be read.
CorpusBundle ingest_corpus(const std::string& path);

}  // namespace xrouter::benchctl
