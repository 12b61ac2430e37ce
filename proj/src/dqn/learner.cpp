#include "pool/dqn/learner.hpp"

#include "pool/tabular.hpp"

namespace pool::dqn {

Learner::Learner(int obs_size, int window_size, int n_actions, const LearnerConfig& cfg, std::uint64_t seed)
    : online(obs_size, window_size, n_actions, cfg),
      target(obs_size, window_size, n_actions, cfg),
      buffer(static_cast<std::size_t>(cfg.buffer_capacity)),
      cfg_(cfg) {
  cfg.validate();
  Rng rng(seed);
  online.initialize(rng);
  copy_into(target, online);
  processor_opt = nn::Adam(online.processor().param_count(), cfg.learning_rate);
  receptor_opt = nn::Adam(online.receptor().param_count(), cfg.learning_rate);
}

bool Learner::train_step(Rng& rng) {
  if (buffer.size() < static_cast<std::size_t>(cfg_.warmup) || buffer.size() == 0) return false;
  const auto idx = buffer.sample_indices(static_cast<std::size_t>(cfg_.batch_size), rng);
  std::vector<const Transition*> batch;
  batch.reserve(idx.size());
  for (auto i : idx) batch.push_back(&buffer.at(i));
  auto grads = online.make_gradients();
  last_loss = td_loss(batch, online, target, cfg_.gamma, &grads);
  processor_opt.step(online.processor(), grads.processor);
  receptor_opt.step(online.receptor(), grads.receptor);
  ++grad_steps;
  if (grad_steps % cfg_.target_sync == 0) copy_into(target, online);
  return true;
}

ActOutput act_and_deposit(const QNetwork& net, std::span<const AgentInput> agents, const PheromoneField& field,
                          const MediumConfig& medium, bool use_pheromones, double epsilon, Rng& rng,
                          bool select) {
  ActOutput out;
  out.actions.resize(agents.size(), 0);
  out.windows.resize(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    auto& window = out.windows[i];
    if (use_pheromones) {
      window = field.perceive(agents[i].cell, medium.perception_radius);
    } else {
      window.assign(medium.window_size(), 0.0);
    }
    const auto q = net.q_values(agents[i].obs, window);
    if (use_pheromones) {
      append_deposits(out.deposits, q, agents[i].cell, medium.influence_radius, medium.grid_h, medium.grid_w);
    }
    if (select) out.actions[i] = select_action(q, epsilon, rng);
  }
  return out;
}

}  // namespace pool::dqn
