package com.example.weather;

import android.content.Context;

import java.io.File;
import java.io.FileInputStream;
import java.io.FileWriter;
import java.io.IOException;

final class CacheStore {
    private final File dir;

    CacheStore(Context context) {
        dir = context.getCacheDir();
    }

    void write(String json) throws IOException {
        FileWriter out = new FileWriter(new File(dir, "cache/forecast.json"));
        out.write(json);
        out.close();
    }

    int firstByte() throws IOException {
        FileInputStream input = new FileInputStream(new File(dir, "cache/forecast.json"));
        int b = input.read();
        input.close();
        return b;
    }

    boolean exists() {
        return new File(dir, "index").exists();
    }
}
