package com.example.weather;

import android.app.Service;
import android.content.Intent;
import android.os.IBinder;

public class RefreshService extends Service {
    private final WeatherClient client = new WeatherClient();

    @Override
    public int onStartCommand(Intent intent, int flags, int startId) {
        Thread worker = new Thread(this::refresh);
        worker.start();
        return START_STICKY;
    }

    private void refresh() {
        try {
            client.fetch("Lisbon");
        } catch (java.io.IOException e) {
            stopSelf();
        }
    }

    @Override
    public IBinder onBind(Intent intent) {
        return null;
    }
}
