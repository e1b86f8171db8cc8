#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace copp {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Fluent or action does not belong to the domain it is used with.
class DomainMismatchError : public Error {
public:
    explicit DomainMismatchError(const std::string &msg) : Error(msg) {}
};

class InapplicableActionError : public Error {
public:
    InapplicableActionError(const std::string &msg, std::size_t step_index)
        : Error(msg), step(step_index) {}
    std::size_t step;
};

// Sensor map is not total over the queried pair.
class IncompleteSensorError : public Error {
public:
    explicit IncompleteSensorError(const std::string &msg) : Error(msg) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string &msg, int line_no, int col_no)
        : Error("line " + std::to_string(line_no) + ":" + std::to_string(col_no) +
                ": " + msg),
          line(line_no), col(col_no) {}
    int line;
    int col;
};

// Reachable-state cap exceeded while grounding the IP.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string &msg) : Error(msg) {}
};

class BoundsError : public Error {
public:
    explicit BoundsError(const std::string &msg) : Error(msg) {}
};

// Internal bug trap: decoded plan disagrees with the solver assignment.
class EncodingSoundnessError : public Error {
public:
    explicit EncodingSoundnessError(const std::string &msg) : Error(msg) {}
};

} // namespace copp
