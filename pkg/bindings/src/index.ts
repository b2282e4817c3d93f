export { Client, Env, VecEnv } from "./env.js";
export type { ResetResult, StepResult } from "./env.js";
export { Server, ServerError } from "./protocol.js";
export type { ServerOptions } from "./protocol.js";
export { CheckpointError, Policy } from "./policy.js";
export {
  deriveSeed,
  legalIds,
  mix64,
  scriptedAction,
  scriptedEpisodeBase,
  scriptedResetSeed,
} from "./script.js";
