#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sbt {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitBackend = 3 };

/// Entry point of the search command. `args` excludes the program name.
///
///   -e <name|index>  experiment to run (required)
///   -n <population>  population size override
///   -t <HH:MM:SS>    wall-clock budget override
///   -i <generations> generation limit override
///   -s <seed>        seed override
///   -o <dir>         results root (default $SBT_RESULTS_ROOT, else "results")
///   -c <file>        experiment registry (default $SBT_EXPERIMENTS, else
///                    experiments/registry.yaml)
///   --workers <k>    evaluation workers
///   --run-id <id>    fixed run directory name
///   --list           print the registry and exit
///
/// Returns 0 on success, 2 on usage or configuration errors, 3 on simulation
/// backend or I/O errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbt
