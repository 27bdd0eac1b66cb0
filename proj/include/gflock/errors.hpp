#pragma once

#include <stdexcept>
#include <string>

namespace gflock {

// Invalid configuration (bad file, bad field, violated invariant).
// The message carries the offending field path where one exists.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation received input outside its mathematical domain
// (empty series, all-zero velocities, zero-speed alignment neighbor).
class degenerate_input : public std::runtime_error {
public:
    explicit degenerate_input(const std::string& msg) : std::runtime_error(msg) {}
};

// A persisted file failed structural checks (truncated, corrupt).
class integrity_error : public std::runtime_error {
public:
    explicit integrity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A persisted file is well-formed but belongs to a different configuration.
class compatibility_error : public std::runtime_error {
public:
    explicit compatibility_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gflock
