#pragma once

#include "pvmincq/dataset.hpp"
#include "pvmincq/diagnostics.hpp"
#include "pvmincq/matching.hpp"
#include "pvmincq/metrics.hpp"
#include "pvmincq/mincq.hpp"
#include "pvmincq/pipeline.hpp"
#include "pvmincq/sample.hpp"
#include "pvmincq/selflabel.hpp"
#include "pvmincq/validation.hpp"
#include "pvmincq/voters.hpp"
