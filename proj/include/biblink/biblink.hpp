#pragma once

// Umbrella header for the record-linkage toolkit. The Crossref harvesting
// adapter lives in biblink/crossref.hpp and is not pulled in here, so code
// that never harvests does not pay for the HTTP client.

#include "biblink/blocking.hpp"
#include "biblink/citation_overlap.hpp"
#include "biblink/corpus_io.hpp"
#include "biblink/coverage.hpp"
#include "biblink/csv.hpp"
#include "biblink/matcher.hpp"
#include "biblink/model.hpp"
#include "biblink/normalize.hpp"
#include "biblink/random.hpp"
#include "biblink/reports.hpp"
#include "biblink/sha256.hpp"
#include "biblink/similarity.hpp"
