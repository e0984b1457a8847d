#pragma once

// Command-line front end. run_cli is the whole program minus process setup,
// so tests can drive commands in-process and capture their output.

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace ontoq {

class Pipeline;

enum ExitCode : int { kExitOk = 0, kExitIo = 2, kExitValidation = 3, kExitUncompilable = 4, kExitInternal = 5 };

int exit_code_for(const std::exception& e);

struct CliStreams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  bool interactive = false;  // REPL prints prompts
};

int run_cli(const std::vector<std::string>& args, CliStreams io);

/// Installs the HTTP routes on `server`; queries read the latest snapshot,
/// uploads are serialized.
void install_routes(httplib::Server& server, Pipeline& pipeline);

}  // namespace ontoq
