#include "loansynth/protocol.hpp"

#include <algorithm>

namespace loansynth {

bool Protocol::loadable(const std::string&) const { return false; }

void Protocol::load(LedgerState&, const std::string& name, const Amount&) const
{
    throw std::invalid_argument(id() + "." + name + " is not loadable");
}

MethodInfo Protocol::method_info(const std::string& method) const
{
    for (auto& m : methods())
        if (m.name == method)
            return m;
    throw std::invalid_argument("protocol " + id() + " has no method " + method);
}

void Protocol::require(bool cond, const std::string& message)
{
    if (!cond)
        throw Revert(message);
}

std::pair<std::string, std::string> split_ref(const std::string& ref)
{
    auto dot = ref.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == ref.size())
        throw std::invalid_argument("malformed state reference '" + ref + "'");
    return {ref.substr(0, dot), ref.substr(dot + 1)};
}

World::World(std::shared_ptr<const TokenRegistry> registry) : state_(std::move(registry)) {}

void World::add_protocol(std::shared_ptr<const Protocol> protocol)
{
    if (has_protocol(protocol->id()))
        throw std::invalid_argument("duplicate protocol id " + protocol->id());
    protocols_.push_back(std::move(protocol));
}

bool World::has_protocol(const std::string& id) const
{
    return std::any_of(protocols_.begin(), protocols_.end(), [&](const auto& p) { return p->id() == id; });
}

const Protocol& World::protocol(const std::string& id) const
{
    for (const auto& p : protocols_)
        if (p->id() == id)
            return *p;
    throw std::out_of_range("unknown protocol " + id);
}

std::vector<std::string> World::protocol_ids() const
{
    std::vector<std::string> ids;
    for (const auto& p : protocols_)
        ids.push_back(p->id());
    return ids;
}

bool World::readable(const std::string& ref) const
{
    auto dot = ref.find('.');
    if (dot == std::string::npos)
        return false;
    auto [proto, name] = split_ref(ref);
    return has_protocol(proto) && protocol(proto).readable(state_, name);
}

Amount World::read(const std::string& ref) const
{
    auto [proto, name] = split_ref(ref);
    return protocol(proto).read(state_, name);
}

bool World::loadable(const std::string& ref) const
{
    auto [proto, name] = split_ref(ref);
    return has_protocol(proto) && protocol(proto).loadable(name);
}

void World::load(const std::string& ref, const Amount& value)
{
    auto [proto, name] = split_ref(ref);
    protocol(proto).load(state_, name, value);
}

bool World::is_view(const std::string& ref) const
{
    auto [proto, name] = split_ref(ref);
    return protocol(proto).is_view(name);
}

void World::call(const std::string& caller, const std::string& protocol_id, const std::string& method,
                 const std::vector<std::string>& fixed, std::span<const Amount> params)
{
    const Protocol& target = protocol(protocol_id);
    LedgerState saved = state_;
    try {
        target.call(state_, caller, method, fixed, params);
    } catch (const Revert&) {
        state_ = std::move(saved);
        throw;
    } catch (const std::overflow_error& e) {
        state_ = std::move(saved);
        throw Revert(std::string("arithmetic overflow: ") + e.what());
    } catch (const std::range_error& e) {
        state_ = std::move(saved);
        throw Revert(std::string("arithmetic error: ") + e.what());
    }
}

} // namespace loansynth
