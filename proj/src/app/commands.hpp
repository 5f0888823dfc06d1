#pragma once

#include <filesystem>
#include <vector>

#include "app/config.hpp"
#include "json.hpp"

namespace oppscreen {

// Each command writes its files under the configured paths (atomically) and
// returns a JSON summary; a "text" member, when present, is meant for the
// terminal.

// dataset.path -> dataset.processed (JSONL) + <out>/discards.jsonl
nlohmann::json run_preprocess(const RunConfig& cfg);

// Per cascade layer grid search on the processed corpus -> <out>/grid-search.json
nlohmann::json run_grid_search(const RunConfig& cfg);

// Trains the cascade on the processed corpus and saves the bundle to classify.model.
nlohmann::json run_train(const RunConfig& cfg);

// One report set per protocol (experiment.protocols when `protocols` is
// empty): <out>/experiment-p{N}.json and .txt, depth-sweep-p{N}.csv for
// protocols 3 and 4, and delta-p{a}-p{b}.json/.txt from the first protocol
// to each later one.
nlohmann::json run_experiment(const RunConfig& cfg, std::vector<int> protocols = {});

// Classifies classify.input (raw dataset or processed JSONL) with the bundle:
// <out>/classified.jsonl, <out>/tickers.json, <out>/tickers.csv.
nlohmann::json run_classify(const RunConfig& cfg);

// Renders saved experiment reports (every <out>/experiment-p*.json when
// `inputs` is empty) to <out>/report.txt.
nlohmann::json run_report(const RunConfig& cfg, std::vector<std::filesystem::path> inputs = {});

}  // namespace oppscreen
