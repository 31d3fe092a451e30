// Copyright 2026 The EntityForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "entityforge/synth.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "entityforge/error.h"
#include "entityforge/tx_stream.h"

namespace entityforge {
namespace {

constexpr int kFundingFanout = 20;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 13 base32 digits cover 64 bits and stay inside the small-string buffer.
std::string Base32(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuv";
  std::string out(13, '0');
  for (int k = 12; k >= 0; --k) {
    out[k] = kDigits[v & 31];
    v >>= 5;
  }
  return out;
}

struct Utxo {
  std::string script;
  Satoshis value = 0;
};

struct Wallet {
  std::vector<Utxo> utxos;
  std::string public_address;
  // Services only.
  std::vector<Utxo> deposits;
  std::unordered_map<std::string, int> deposit_scripts;
};

class Simulator {
 public:
  Simulator(std::uint64_t seed, const SynthParams& p)
      : p_(p),
        rng_(seed),
        wallets_(p.num_users),
        spender_pos_(p.num_users, -1),
        dust_(2 * p.fee_max),
        min_spend_(p.fee_max + dust_) {}

  SynthDataset Run();

 private:
  std::string NewScript(std::uint32_t user) {
    std::string s = Base32(SplitMix64(script_counter_++));
    owner_.emplace(s, user);
    return s;
  }

  std::string NewTxid() {
    return Base32(SplitMix64(tx_counter_++ ^ 0x5bd1e9955bd1e995ULL));
  }

  BlockIndex CurrentBlock() const {
    return p_.start_block +
           static_cast<BlockIndex>(slot_) /
               static_cast<BlockIndex>(p_.txs_per_block);
  }

  bool Chance(double prob) { return std::bernoulli_distribution(prob)(rng_); }

  Satoshis Uniform(Satoshis lo, Satoshis hi) {
    return std::uniform_int_distribution<Satoshis>(lo, hi)(rng_);
  }

  Satoshis DrawFee() {
    Satoshis fee = Uniform(p_.fee_min, p_.fee_max);
    return fee % 10 == 0 ? fee + 1 : fee;
  }

  void Emit(RawTransaction tx, const char* kind) {
    tx.txid = NewTxid();
    tx.block = CurrentBlock();
    ++counts_[kind];
    out_.push_back(std::move(tx));
    ++slot_;
  }

  void Credit(std::uint32_t user, std::string script, Satoshis value) {
    if (value < min_spend_) return;
    Wallet& w = wallets_[user];
    w.utxos.push_back({std::move(script), value});
    if (w.utxos.size() == 1) {
      spender_pos_[user] = static_cast<std::int64_t>(spenders_.size());
      spenders_.push_back(user);
    }
  }

  Utxo Take(std::uint32_t user, std::size_t index) {
    Wallet& w = wallets_[user];
    Utxo u = std::move(w.utxos[index]);
    w.utxos[index] = std::move(w.utxos.back());
    w.utxos.pop_back();
    if (w.utxos.empty()) {
      const auto pos = spender_pos_[user];
      spenders_[pos] = spenders_.back();
      spender_pos_[spenders_.back()] = pos;
      spenders_.pop_back();
      spender_pos_[user] = -1;
    }
    return u;
  }

  std::uint32_t RandomUser(std::uint32_t except) {
    std::uint32_t user;
    do {
      user = static_cast<std::uint32_t>(Uniform(1, p_.num_users - 1));
    } while (user == except);
    return user;
  }

  void Fund();
  void Payment();
  void CoinJoin();
  void Sweep(std::uint32_t service, const char* kind = "sweep");
  std::optional<std::uint32_t> HeldDeposits() const;

  // Output script for a payment from `payer` to `payee`.
  std::string PayeeScript(std::uint32_t payer, std::uint32_t payee,
                          bool deposit);
  void Deliver(std::uint32_t payee, const std::string& script, Satoshis value,
               bool deposit);
  // Shapes an amount within [lo, hi] into a round or visibly non-round one.
  Satoshis ShapeAmount(Satoshis amount, Satoshis lo, Satoshis hi);

  const SynthParams& p_;
  std::mt19937_64 rng_;
  std::vector<Wallet> wallets_;
  std::vector<std::uint32_t> spenders_;
  std::vector<std::int64_t> spender_pos_;
  std::unordered_map<std::string, std::uint32_t> owner_;
  std::unordered_map<std::uint64_t, std::string> deposit_address_;
  std::vector<std::uint32_t> pending_sweeps_;
  std::vector<RawTransaction> out_;
  std::map<std::string, std::uint64_t> counts_;
  const Satoshis dust_;
  const Satoshis min_spend_;
  std::uint64_t script_counter_ = 0;
  std::uint64_t tx_counter_ = 0;
  std::uint64_t slot_ = 0;
};

void Simulator::Fund() {
  const auto users = static_cast<std::uint32_t>(p_.num_users);
  std::vector<Satoshis> grants(users, 0);
  for (std::uint32_t u = 1; u < users; ++u) {
    grants[u] = Uniform(p_.funding_min, p_.funding_max);
  }
  const std::uint32_t batches = (users - 1 + kFundingFanout - 1) / kFundingFanout;
  std::vector<Satoshis> fees(batches);
  Satoshis total = 0;
  for (auto& fee : fees) {
    fee = DrawFee();
    total += fee;
  }
  for (Satoshis g : grants) total += g;

  RawTransaction coinbase;
  std::string faucet = NewScript(0);
  coinbase.outputs.push_back({faucet, static_cast<std::int64_t>(total)});
  coinbase.txid = NewTxid();
  coinbase.block = p_.start_block;
  ++counts_["coinbase"];
  out_.push_back(std::move(coinbase));

  Satoshis balance = total;
  std::uint32_t next = 1;
  for (std::uint32_t b = 0; b < batches; ++b) {
    RawTransaction tx;
    tx.inputs.push_back({faucet, static_cast<std::int64_t>(balance)});
    balance -= fees[b];
    for (int k = 0; k < kFundingFanout && next < users; ++k, ++next) {
      std::string script = NewScript(next);
      tx.outputs.push_back({script, static_cast<std::int64_t>(grants[next])});
      balance -= grants[next];
      Credit(next, std::move(script), grants[next]);
    }
    if (balance > 0) {
      faucet = NewScript(0);
      tx.outputs.push_back({faucet, static_cast<std::int64_t>(balance)});
    }
    Emit(std::move(tx), "funding");
  }
}

Satoshis Simulator::ShapeAmount(Satoshis amount, Satoshis lo, Satoshis hi) {
  if (Chance(p_.round_payment_rate)) {
    Satoshis unit = 1;
    for (int k = 0; k < p_.round_exponent; ++k) unit *= 10;
    const Satoshis rounded = amount - amount % unit;
    if (rounded >= lo && rounded > 0) {
      ++counts_["round_payment"];
      return rounded;
    }
  }
  if (amount % 10 == 0) {
    if (amount + 1 <= hi) return amount + 1;
    if (amount - 1 >= lo) return amount - 1;
  }
  return amount;
}

std::string Simulator::PayeeScript(std::uint32_t payer, std::uint32_t payee,
                                   bool deposit) {
  if (deposit) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(payee) << 32) | payer;
    auto it = deposit_address_.find(key);
    if (it == deposit_address_.end()) {
      it = deposit_address_.emplace(key, NewScript(payee)).first;
    }
    return it->second;
  }
  Wallet& w = wallets_[payee];
  if (w.public_address.empty()) {
    w.public_address = NewScript(payee);
    return w.public_address;
  }
  if (Chance(p_.address_reuse_prob)) return w.public_address;
  return NewScript(payee);
}

void Simulator::Deliver(std::uint32_t payee, const std::string& script,
                        Satoshis value, bool deposit) {
  if (!deposit) {
    Credit(payee, script, value);
    return;
  }
  Wallet& w = wallets_[payee];
  w.deposits.push_back({script, value});
  if (++w.deposit_scripts[script] == 1 &&
      w.deposit_scripts.size() ==
          static_cast<std::size_t>(p_.sweep_min_inputs)) {
    pending_sweeps_.push_back(payee);
  }
}

void Simulator::Payment() {
  if (spenders_.empty()) {
    ThrowConfig("infeasible-params",
                "no user holds a spendable output at block " +
                    std::to_string(CurrentBlock()));
  }
  const std::uint32_t payer =
      spenders_[Uniform(0, spenders_.size() - 1)];
  const bool deposit = p_.num_services > 0 && Chance(p_.deposit_rate) &&
                       !(p_.num_services == 1 && payer == 1);
  std::uint32_t payee;
  if (deposit) {
    do {
      payee = static_cast<std::uint32_t>(Uniform(1, p_.num_services));
    } while (payee == payer);
  } else {
    payee = RandomUser(payer);
  }
  Satoshis fee = DrawFee();
  Wallet& w = wallets_[payer];

  RawTransaction tx;
  Satoshis pay = 0;
  Satoshis change = 0;
  std::string change_to;

  // Forced consolidation: the two largest outputs at distinct scripts, and
  // an amount only their sum covers.
  std::optional<std::pair<std::size_t, std::size_t>> pair;
  if (Chance(p_.consolidation_prob) && w.utxos.size() >= 2) {
    std::size_t first = 0;
    for (std::size_t k = 1; k < w.utxos.size(); ++k) {
      if (w.utxos[k].value > w.utxos[first].value) first = k;
    }
    std::optional<std::size_t> second;
    for (std::size_t k = 0; k < w.utxos.size(); ++k) {
      if (k == first || w.utxos[k].script == w.utxos[first].script) continue;
      if (!second || w.utxos[k].value > w.utxos[*second].value) second = k;
    }
    if (second && w.utxos[*second].value > fee + dust_) {
      pair = std::make_pair(first, *second);
    }
  }

  if (pair) {
    // Take the higher index first so the lower stays valid.
    const auto [i, j] = *pair;
    Utxo a = Take(payer, std::max(i, j));
    Utxo b = Take(payer, std::min(i, j));
    const Satoshis high = std::max(a.value, b.value);
    const Satoshis total = a.value + b.value;
    const Satoshis lo = high + 1;
    const Satoshis hi = total - fee - dust_;
    pay = ShapeAmount(Uniform(lo, hi), lo, hi);
    change = total - fee - pay;
    change_to = Chance(p_.fresh_change_prob) ? NewScript(payer) : a.script;
    tx.inputs.push_back({a.script, static_cast<std::int64_t>(a.value)});
    tx.inputs.push_back({b.script, static_cast<std::int64_t>(b.value)});
    ++counts_["consolidation"];
  } else {
    Utxo u = Take(payer, Uniform(0, w.utxos.size() - 1));
    tx.inputs.push_back({u.script, static_cast<std::int64_t>(u.value)});
    const Satoshis avail = u.value - fee;
    if (avail < 2 * dust_) {
      pay = avail;
      ++counts_["changeless_payment"];
    } else {
      const Satoshis lo = dust_;
      const Satoshis hi = avail - dust_;
      pay = ShapeAmount(Uniform(lo, hi), lo, hi);
      change = avail - pay;
      if (change == pay) {
        ++fee;
        --change;
      }
      if (Chance(p_.fresh_change_prob)) {
        change_to = NewScript(payer);
      } else {
        change_to = u.script;
        ++counts_["self_change"];
      }
    }
  }

  const std::string pay_to = PayeeScript(payer, payee, deposit);
  tx.outputs.push_back({pay_to, static_cast<std::int64_t>(pay)});
  if (change > 0) {
    tx.outputs.push_back({change_to, static_cast<std::int64_t>(change)});
    if (Chance(0.5)) std::swap(tx.outputs[0], tx.outputs[1]);
  }
  Emit(std::move(tx), deposit ? "deposit" : "payment");
  Deliver(payee, pay_to, pay, deposit);
  if (change > 0) Credit(payer, change_to, change);
}

void Simulator::CoinJoin() {
  struct Seat {
    std::uint32_t user;
    Utxo utxo;
    Satoshis fee;
  };
  const Satoshis need = p_.fee_max + 2 * dust_ + 1;
  std::vector<Seat> seats;
  for (int attempt = 0;
       attempt < 4 * p_.coinjoin_participants &&
       seats.size() < static_cast<std::size_t>(p_.coinjoin_participants) &&
       !spenders_.empty();
       ++attempt) {
    const std::uint32_t user = spenders_[Uniform(0, spenders_.size() - 1)];
    if (std::any_of(seats.begin(), seats.end(),
                    [&](const Seat& s) { return s.user == user; })) {
      continue;
    }
    const auto& utxos = wallets_[user].utxos;
    const std::size_t k = Uniform(0, utxos.size() - 1);
    if (utxos[k].value < need) continue;
    seats.push_back({user, Take(user, k), DrawFee()});
  }
  if (seats.size() < 2) {
    for (Seat& s : seats) Credit(s.user, std::move(s.utxo.script), s.utxo.value);
    Payment();
    return;
  }
  Satoshis cap = seats[0].utxo.value - seats[0].fee;
  for (const Seat& s : seats) cap = std::min(cap, s.utxo.value - s.fee);
  const Satoshis denomination = Uniform(dust_, cap - dust_);

  RawTransaction tx;
  std::vector<std::pair<std::uint32_t, Utxo>> credits;
  for (const Seat& s : seats) {
    tx.inputs.push_back({s.utxo.script, static_cast<std::int64_t>(s.utxo.value)});
    std::string mixed = NewScript(s.user);
    std::string change = NewScript(s.user);
    const Satoshis rest = s.utxo.value - s.fee - denomination;
    tx.outputs.push_back({mixed, static_cast<std::int64_t>(denomination)});
    tx.outputs.push_back({change, static_cast<std::int64_t>(rest)});
    credits.push_back({s.user, {std::move(mixed), denomination}});
    credits.push_back({s.user, {std::move(change), rest}});
  }
  std::shuffle(tx.inputs.begin(), tx.inputs.end(), rng_);
  std::shuffle(tx.outputs.begin(), tx.outputs.end(), rng_);
  Emit(std::move(tx), "coinjoin");
  for (auto& [user, utxo] : credits) {
    Credit(user, std::move(utxo.script), utxo.value);
  }
}

std::optional<std::uint32_t> Simulator::HeldDeposits() const {
  for (int u = 1; u <= p_.num_services; ++u) {
    if (!wallets_[u].deposits.empty()) return static_cast<std::uint32_t>(u);
  }
  return std::nullopt;
}

void Simulator::Sweep(std::uint32_t service, const char* kind) {
  Wallet& w = wallets_[service];
  RawTransaction tx;
  Satoshis total = 0;
  for (const Utxo& u : w.deposits) {
    tx.inputs.push_back({u.script, static_cast<std::int64_t>(u.value)});
    total += u.value;
  }
  const Satoshis fee = DrawFee();
  std::string to = NewScript(service);
  tx.outputs.push_back({to, static_cast<std::int64_t>(total - fee)});
  w.deposits.clear();
  w.deposit_scripts.clear();
  Emit(std::move(tx), kind);
  Credit(service, std::move(to), total - fee);
}

SynthDataset Simulator::Run() {
  const std::uint64_t slots = static_cast<std::uint64_t>(p_.num_blocks) *
                              static_cast<std::uint64_t>(p_.txs_per_block);
  const std::uint64_t funding =
      (static_cast<std::uint64_t>(p_.num_users) - 1 + kFundingFanout - 1) /
      kFundingFanout;
  if (funding >= slots) {
    ThrowConfig("infeasible-params",
                "funding needs " + std::to_string(funding) +
                    " transactions but only " + std::to_string(slots) +
                    " slots exist");
  }
  out_.reserve(slots + 1);
  Fund();
  while (slot_ < slots) {
    if (!pending_sweeps_.empty()) {
      const std::uint32_t service = pending_sweeps_.back();
      pending_sweeps_.pop_back();
      Sweep(service);
    } else if (spenders_.empty() && HeldDeposits()) {
      // Nobody can pay; a service empties its deposits below the threshold.
      Sweep(*HeldDeposits(), "early_sweep");
    } else if (p_.coinjoin_rate > 0 && Chance(p_.coinjoin_rate)) {
      CoinJoin();
    } else {
      Payment();
    }
  }

  SynthDataset data;
  ScriptTable table;
  Ingestor ingestor(table);
  for (const RawTransaction& raw : out_) ingestor.Ingest(raw);
  data.truth.user_of.resize(table.size());
  for (ScriptId id = 0; id < table.size(); ++id) {
    data.truth.user_of[id] = owner_.at(std::string(table.Text(id)));
  }
  data.summary["transactions"] = out_.size();
  data.summary["scripts"] = table.size();
  for (const char* kind :
       {"coinbase", "funding", "payment", "deposit", "sweep", "early_sweep",
        "coinjoin",
        "consolidation", "changeless_payment", "round_payment", "self_change"}) {
    data.summary[kind] = counts_[kind];
  }
  data.transactions = std::move(out_);
  return data;
}

template <typename T>
void ReadField(const nlohmann::json& value, std::string_view key, T& into) {
  try {
    into = value.get<T>();
  } catch (const nlohmann::json::exception&) {
    ThrowConfig("bad-params",
                "parameter '" + std::string(key) + "' has the wrong type");
  }
}

std::uint64_t Choose2(std::uint64_t n) { return n * (n - 1) / 2; }

}  // namespace

SynthParams SynthParams::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) ThrowConfig("bad-params", "parameters must be an object");
  SynthParams p;
  for (const auto& [key, value] : j.items()) {
    if (key == "num_users") ReadField(value, key, p.num_users);
    else if (key == "num_services") ReadField(value, key, p.num_services);
    else if (key == "start_block") ReadField(value, key, p.start_block);
    else if (key == "num_blocks") ReadField(value, key, p.num_blocks);
    else if (key == "txs_per_block") ReadField(value, key, p.txs_per_block);
    else if (key == "funding_min") ReadField(value, key, p.funding_min);
    else if (key == "funding_max") ReadField(value, key, p.funding_max);
    else if (key == "fee_min") ReadField(value, key, p.fee_min);
    else if (key == "fee_max") ReadField(value, key, p.fee_max);
    else if (key == "fresh_change_prob") ReadField(value, key, p.fresh_change_prob);
    else if (key == "address_reuse_prob") ReadField(value, key, p.address_reuse_prob);
    else if (key == "consolidation_prob") ReadField(value, key, p.consolidation_prob);
    else if (key == "coinjoin_rate") ReadField(value, key, p.coinjoin_rate);
    else if (key == "coinjoin_participants") ReadField(value, key, p.coinjoin_participants);
    else if (key == "deposit_rate") ReadField(value, key, p.deposit_rate);
    else if (key == "sweep_min_inputs") ReadField(value, key, p.sweep_min_inputs);
    else if (key == "round_payment_rate") ReadField(value, key, p.round_payment_rate);
    else if (key == "round_exponent") ReadField(value, key, p.round_exponent);
    else ThrowConfig("bad-params", "unknown parameter '" + key + "'");
  }
  p.Validate();
  return p;
}

nlohmann::ordered_json SynthParams::ToJson() const {
  return {
      {"num_users", num_users},
      {"num_services", num_services},
      {"start_block", start_block},
      {"num_blocks", num_blocks},
      {"txs_per_block", txs_per_block},
      {"funding_min", funding_min},
      {"funding_max", funding_max},
      {"fee_min", fee_min},
      {"fee_max", fee_max},
      {"fresh_change_prob", fresh_change_prob},
      {"address_reuse_prob", address_reuse_prob},
      {"consolidation_prob", consolidation_prob},
      {"coinjoin_rate", coinjoin_rate},
      {"coinjoin_participants", coinjoin_participants},
      {"deposit_rate", deposit_rate},
      {"sweep_min_inputs", sweep_min_inputs},
      {"round_payment_rate", round_payment_rate},
      {"round_exponent", round_exponent},
  };
}

void SynthParams::Validate() const {
  auto fail = [](const std::string& what) {
    ThrowConfig("infeasible-params", what);
  };
  for (double prob : {fresh_change_prob, address_reuse_prob,
                      consolidation_prob, coinjoin_rate, deposit_rate,
                      round_payment_rate}) {
    if (!(prob >= 0.0 && prob <= 1.0)) fail("probabilities must lie in [0,1]");
  }
  if (num_services < 0) fail("num_services must be >= 0");
  if (num_users < num_services + 3) {
    fail("num_users must exceed num_services by at least 3");
  }
  if (num_blocks < 1 || txs_per_block < 1) {
    fail("num_blocks and txs_per_block must be positive");
  }
  if (fee_min < 1 || fee_min > fee_max) fail("need 1 <= fee_min <= fee_max");
  if (fee_max > 1'000'000'000) fail("fee_max is unreasonably large");
  if (funding_min > funding_max) fail("need funding_min <= funding_max");
  if (funding_min < 8 * fee_max) {
    fail("funding_min must be at least 8 * fee_max so users can pay");
  }
  if (funding_max > (std::uint64_t{1} << 62) /
                        static_cast<std::uint64_t>(num_users)) {
    fail("total funding overflows");
  }
  if (coinjoin_participants < 2 || coinjoin_participants >= num_users) {
    fail("coinjoin_participants must lie in [2, num_users)");
  }
  if (sweep_min_inputs < 2) fail("sweep_min_inputs must be >= 2");
  // Customers exclude the faucet and the service itself.
  if (num_services > 0 && sweep_min_inputs > num_users - 2) {
    fail("sweep_min_inputs exceeds the number of possible customers");
  }
  if (round_exponent < 0 || round_exponent > 15) {
    fail("round_exponent must lie in [0, 15]");
  }
}

void GroundTruth::WriteCsv(std::ostream& out) const {
  out << "script_id,user_id\n";
  for (std::size_t id = 0; id < user_of.size(); ++id) {
    out << id << ',' << user_of[id] << '\n';
  }
}

GroundTruth GroundTruth::ReadCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("script_id,user_id", 0) != 0) {
    ThrowData("bad-truth", "missing `script_id,user_id` header");
  }
  GroundTruth truth;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::uint64_t id = 0;
    std::uint32_t user = 0;
    char comma = 0;
    if (!(ss >> id >> comma >> user) || comma != ',' ||
        id != truth.user_of.size()) {
      ThrowData("bad-truth", "bad truth row '" + line + "'");
    }
    truth.user_of.push_back(user);
  }
  return truth;
}

SynthDataset Generate(std::uint64_t seed, const SynthParams& params) {
  params.Validate();
  return Simulator(seed, params).Run();
}

void WriteDataset(const SynthDataset& data, std::uint64_t seed,
                  const SynthParams& params, const std::string& prefix) {
  auto open = [](const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) ThrowIo("open-failed", "cannot write '" + path + "'");
    return out;
  };
  {
    auto out = open(prefix + ".jsonl");
    WriteJsonl(out, data.transactions);
  }
  {
    auto out = open(prefix + ".truth.csv");
    data.truth.WriteCsv(out);
  }
  {
    auto out = open(prefix + ".meta.json");
    nlohmann::ordered_json meta;
    meta["seed"] = seed;
    meta["params"] = params.ToJson();
    meta["summary"] = data.summary;
    out << meta.dump(2) << '\n';
  }
}

nlohmann::ordered_json ScoreMetrics::ToJson() const {
  return {
      {"precision", precision},
      {"recall", recall},
      {"collapsed_clusters", collapsed_clusters},
      {"clusters", clusters},
      {"same_cluster_pairs", same_cluster_pairs},
      {"same_user_pairs", same_user_pairs},
      {"agreeing_pairs", agreeing_pairs},
  };
}

ScoreMetrics Score(const ClusterSet& partition, const GroundTruth& truth) {
  const std::size_t n = truth.user_of.size();
  if (partition.domain_size() != n || partition.num_scripts() != n) {
    ThrowData("script-mismatch",
              "partition covers " + std::to_string(partition.num_scripts()) +
                  " scripts, truth covers " + std::to_string(n));
  }
  const std::vector<ScriptId> labels = partition.CanonicalLabels();
  std::unordered_map<std::uint64_t, std::uint64_t> cells;
  std::unordered_map<ScriptId, std::uint64_t> cluster_size;
  std::unordered_map<std::uint32_t, std::uint64_t> user_size;
  for (std::size_t id = 0; id < n; ++id) {
    const ScriptId label = labels[id];
    const std::uint32_t user = truth.user_of[id];
    ++cells[(static_cast<std::uint64_t>(label) << 32) | user];
    ++cluster_size[label];
    ++user_size[user];
  }
  ScoreMetrics m;
  m.clusters = cluster_size.size();
  std::unordered_map<ScriptId, int> users_per_cluster;
  for (const auto& [key, count] : cells) {
    m.agreeing_pairs += Choose2(count);
    if (++users_per_cluster[static_cast<ScriptId>(key >> 32)] == 2) {
      ++m.collapsed_clusters;
    }
  }
  for (const auto& [label, size] : cluster_size) {
    m.same_cluster_pairs += Choose2(size);
  }
  for (const auto& [user, size] : user_size) m.same_user_pairs += Choose2(size);
  if (m.same_cluster_pairs > 0) {
    m.precision = static_cast<double>(m.agreeing_pairs) /
                  static_cast<double>(m.same_cluster_pairs);
  }
  if (m.same_user_pairs > 0) {
    m.recall = static_cast<double>(m.agreeing_pairs) /
               static_cast<double>(m.same_user_pairs);
  }
  return m;
}

}  // namespace entityforge
