#pragma once

// Umbrella header: the whole toolkit except the HTTP provider, which pulls
// in httplib and is included separately where network access is wanted.

#include "sensebench/baselines.hpp"
#include "sensebench/costs.hpp"
#include "sensebench/dataset.hpp"
#include "sensebench/errors.hpp"
#include "sensebench/eval.hpp"
#include "sensebench/gateway.hpp"
#include "sensebench/llm_wsd.hpp"
#include "sensebench/pagerank.hpp"
#include "sensebench/prompts.hpp"
#include "sensebench/sense_graph.hpp"
#include "sensebench/sense_id.hpp"
#include "sensebench/word_expert.hpp"
