#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cscoop {

// Exit codes of the command-line tool.
//   0  safe / run terminated cleanly
//   1  violation found (counterexample trace written)
//   2  usage or compile error
//   3  state bound or step cap exhausted
int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace cscoop
