#pragma once

namespace nlslab::cli {

// Exit codes: 0 ok, 1 computation error, 2 usage error.
int run(int argc, char** argv);

}  // namespace nlslab::cli
