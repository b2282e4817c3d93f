import { execFile } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { promisify } from "node:util";

export const execFileAsync = promisify(execFile);

const here = dirname(fileURLToPath(import.meta.url));
export const PY_SRC = resolve(here, "..", "..", "src");
export const PYTHON = process.env.TABLETOP_RL_PYTHON ?? "python3";

export function pyEnv(): NodeJS.ProcessEnv {
  const env = { ...process.env };
  env.PYTHONPATH = env.PYTHONPATH ? `${PY_SRC}:${env.PYTHONPATH}` : PY_SRC;
  return env;
}

export async function runNative(args: string[]): Promise<string> {
  const { stdout } = await execFileAsync(PYTHON, ["-m", "tabletop_rl", ...args], {
    env: pyEnv(),
    maxBuffer: 256 * 1024 * 1024,
  });
  return stdout;
}

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}
