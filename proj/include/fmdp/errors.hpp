#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fmdp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: unknown action or variable ids, mismatched scopes.
class ModelError : public Error {
public:
    using Error::Error;
};

/// An operation would materialize a table larger than the configured cap.
class SizeError : public Error {
public:
    SizeError(const std::string& what, std::size_t requested, std::size_t cap)
        : Error(what + ": table of " + std::to_string(requested) + " entries exceeds cap of " +
                std::to_string(cap)),
          requested_(requested), cap_(cap) {}
    std::size_t requested() const noexcept { return requested_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t requested_;
    std::size_t cap_;
};

/// Variable elimination produced a clique whose table exceeds the cap.
class WidthExceeded : public Error {
public:
    WidthExceeded(std::size_t clique_vars, std::size_t clique_entries, std::size_t cap)
        : Error("induced width exceeded: clique of " + std::to_string(clique_vars) +
                " variables (" + std::to_string(clique_entries) + " entries, cap " +
                std::to_string(cap) + ")"),
          clique_vars_(clique_vars), clique_entries_(clique_entries) {}
    std::size_t clique_vars() const noexcept { return clique_vars_; }
    std::size_t clique_entries() const noexcept { return clique_entries_; }

private:
    std::size_t clique_vars_;
    std::size_t clique_entries_;
};

/// The k x k value-determination system stayed singular under every gamma perturbation,
/// or the basis Gram matrix itself is singular.
class SingularSystem : public Error {
public:
    using Error::Error;
};

class StateSpaceTooLarge : public Error {
public:
    using Error::Error;
};

class NonUniqueStationary : public Error {
public:
    using Error::Error;
};

}  // namespace fmdp
