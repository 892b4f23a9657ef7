#pragma once

#include <stdexcept>
#include <string>

namespace isingtri {

// Error taxonomy shared across modules. All derive from std::runtime_error
// so callers can catch coarsely or by kind.

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error("domain: " + msg) {}
};

struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& msg) : std::runtime_error("capacity: " + msg) {}
};

struct pole_error : std::runtime_error {
    explicit pole_error(const std::string& msg) : std::runtime_error("pole: " + msg) {}
};

struct precision_error : std::runtime_error {
    explicit precision_error(const std::string& msg) : std::runtime_error("precision: " + msg) {}
};

struct missing_table_error : std::runtime_error {
    explicit missing_table_error(const std::string& msg) : std::runtime_error("missing table: " + msg) {}
};

struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& msg) : std::runtime_error("budget: " + msg) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error("io: " + msg) {}
};

} // namespace isingtri
