#pragma once

#include <string>
#include <vector>

#include "durkit/pipeline/config.hpp"

namespace durkit::pipeline {

struct StageResult {
    std::string stage;
    std::vector<std::string> artifacts;
    double seconds = 0.0;
    std::string summary;  // one-line outcome for the console
};

/// Each command reads its upstream artifacts from config.outDir, writes
/// its own, and records itself in <out_dir>/manifest.json. Artifact bytes
/// depend only on the config and inputs, never on threads or wall time.
StageResult cmdSynth(const RunConfig& config);
StageResult cmdIngest(const RunConfig& config);
StageResult cmdFeatures(const RunConfig& config);
StageResult cmdAnnotate(const RunConfig& config);
StageResult cmdClassify(const RunConfig& config);
StageResult cmdRegress(const RunConfig& config);
StageResult cmdCorrelate(const RunConfig& config);
StageResult cmdPlotPartials(const RunConfig& config);

}  // namespace durkit::pipeline
