#ifndef HDTORUS_CLI_HPP
#define HDTORUS_CLI_HPP

namespace hdtorus {

// Exit codes: 0 ok, 2 config, 3 domain, 4 size, 5 singularity, 1 other.
int run_cli(int argc, const char* const* argv);

} // namespace hdtorus

#endif
