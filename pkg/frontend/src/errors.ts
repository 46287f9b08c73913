export class UnreadableVideo extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'UnreadableVideo';
  }
}

export class NoFaceFound extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'NoFaceFound';
  }
}

export class AdapterUsageError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'AdapterUsageError';
  }
}
