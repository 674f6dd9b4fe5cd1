#pragma once

#include "loansynth/ledger.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace loansynth {

/// Callable method of a protocol model: discrete arguments (token symbols,
/// addresses) are fixed per action, integer parameters are searched.
struct MethodInfo {
    std::string name;
    std::vector<std::string> fixed_args;
    std::vector<std::string> int_params;
};

/// Executable model of a DeFi contract. All mutable state lives in the
/// LedgerState (member variables under the protocol id, custody as ledger
/// balances of the account named after the protocol id); the model object
/// itself only carries immutable configuration.
class Protocol {
public:
    explicit Protocol(std::string id) : id_(std::move(id)) {}
    virtual ~Protocol() = default;

    const std::string& id() const { return id_; }
    virtual std::string kind() const = 0;
    virtual std::vector<MethodInfo> methods() const = 0;

    /// Readable state: storage variables and read-only views.
    virtual bool readable(const LedgerState& state, const std::string& name) const = 0;
    virtual Amount read(const LedgerState& state, const std::string& name) const = 0;

    /// Whether `name` is backed by storage that can be overwritten directly.
    virtual bool loadable(const std::string& name) const;
    virtual void load(LedgerState& state, const std::string& name, const Amount& value) const;

    /// State names a method may write (storage the method touches; views are
    /// always allowed as poststates).
    virtual std::vector<std::string> writes(const std::string& method,
                                            const std::vector<std::string>& fixed) const = 0;
    virtual bool is_view(const std::string& name) const = 0;

    /// Executes a method. Throws Revert on failure; the caller is responsible
    /// for rollback (World::call does it).
    virtual void call(LedgerState& state, const std::string& caller, const std::string& method,
                      const std::vector<std::string>& fixed, std::span<const Amount> params) const = 0;

protected:
    MethodInfo method_info(const std::string& method) const;
    static void require(bool cond, const std::string& message);

private:
    std::string id_;
};

/// A ledger plus the protocol models that act on it. Copying a World copies
/// the ledger; protocol models are shared and immutable.
class World {
public:
    World() = default;
    explicit World(std::shared_ptr<const TokenRegistry> registry);

    void add_protocol(std::shared_ptr<const Protocol> protocol);
    bool has_protocol(const std::string& id) const;
    const Protocol& protocol(const std::string& id) const;
    std::vector<std::string> protocol_ids() const;

    LedgerState& state() { return state_; }
    const LedgerState& state() const { return state_; }
    const TokenRegistry& registry() const { return state_.registry(); }

    /// State reference "<protocol>.<name>".
    bool readable(const std::string& ref) const;
    Amount read(const std::string& ref) const;
    bool loadable(const std::string& ref) const;
    void load(const std::string& ref, const Amount& value);
    bool is_view(const std::string& ref) const;

    /// Atomic call: on Revert (or arithmetic overflow, which is reported as a
    /// Revert) the ledger is left untouched.
    void call(const std::string& caller, const std::string& protocol, const std::string& method,
              const std::vector<std::string>& fixed, std::span<const Amount> params);

private:
    std::vector<std::shared_ptr<const Protocol>> protocols_;
    LedgerState state_;
};

/// Splits "<protocol>.<name>" at the first dot.
std::pair<std::string, std::string> split_ref(const std::string& ref);

} // namespace loansynth
