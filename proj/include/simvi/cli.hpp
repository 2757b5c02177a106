#pragma once

namespace simvi {

// Exit codes: 0 success, 1 usage or configuration error, 2 solver or I/O
// failure, 3 a verification check failed.
int parse_and_dispatch(int argc, char** argv);

}  // namespace simvi
