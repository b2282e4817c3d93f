/**
 * JSON-lines client for the native environment server.
 *
 * One child process speaks the stdio protocol; requests carry increasing
 * ids and the server answers strictly in order. A request whose reply has
 * ok=false rejects with ServerError carrying the native error type.
 */
import { spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import { createInterface, type Interface } from "node:readline";

export class ServerError extends Error {
  constructor(
    public readonly kind: string,
    message: string,
  ) {
    super(`${kind}: ${message}`);
    this.name = "ServerError";
  }
}

export interface ServerOptions {
  /** Python executable, default "python3" (or TABLETOP_RL_PYTHON). */
  python?: string;
  /** Extra PYTHONPATH entries so `-m tabletop_rl` resolves. */
  pythonPath?: string[];
}

interface Pending {
  resolve: (value: Record<string, unknown>) => void;
  reject: (err: Error) => void;
}

export class Server {
  private child: ChildProcessWithoutNullStreams;
  private lines: Interface;
  private pending = new Map<number, Pending>();
  private nextId = 1;
  private closed = false;

  constructor(options: ServerOptions = {}) {
    const python = options.python ?? process.env.TABLETOP_RL_PYTHON ?? "python3";
    const env = { ...process.env };
    if (options.pythonPath?.length) {
      const extra = options.pythonPath.join(":");
      env.PYTHONPATH = env.PYTHONPATH ? `${extra}:${env.PYTHONPATH}` : extra;
    }
    this.child = spawn(python, ["-m", "tabletop_rl", "serve"], {
      stdio: ["pipe", "pipe", "pipe"],
      env,
    });
    this.child.on("exit", () => {
      this.closed = true;
      for (const p of this.pending.values()) {
        p.reject(new ServerError("ServerExit", "server process exited"));
      }
      this.pending.clear();
    });
    this.lines = createInterface({ input: this.child.stdout });
    this.lines.on("line", (line) => this.onLine(line));
  }

  private onLine(line: string): void {
    let msg: Record<string, unknown>;
    try {
      msg = JSON.parse(line);
    } catch {
      return; // stray non-protocol output
    }
    const id = msg.id as number;
    const waiter = this.pending.get(id);
    if (!waiter) return;
    this.pending.delete(id);
    if (msg.ok) {
      waiter.resolve(msg);
    } else {
      const err = (msg.error ?? {}) as { type?: string; message?: string };
      waiter.reject(new ServerError(err.type ?? "Error", err.message ?? "unknown"));
    }
  }

  request(op: string, fields: Record<string, unknown> = {}): Promise<Record<string, unknown>> {
    if (this.closed) {
      return Promise.reject(new ServerError("ServerExit", "server is closed"));
    }
    const id = this.nextId++;
    const payload = JSON.stringify({ id, op, ...fields });
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      this.child.stdin.write(payload + "\n");
    });
  }

  async shutdown(): Promise<void> {
    if (this.closed) return;
    try {
      await this.request("shutdown");
    } catch {
      // server may already be gone
    }
    this.closed = true;
    this.child.kill();
  }
}
